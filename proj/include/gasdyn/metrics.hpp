#pragma once

#include <cstddef>
#include <vector>

// Exact 1D transport metrics: p-Wasserstein distances between atomic
// probability measures via quantile matching, and the bounded Lipschitz
// (Dudley / Monge-Kantorovich) norm of signed atomic measures via a small
// linear program. These are the two norms used to measure time regularity
// of density and momentum curves.

namespace gasdyn {

struct AtomicMeasure {
    std::vector<double> support;  // strictly increasing
    std::vector<double> weights;  // signed; nonnegative summing to 1 for Wasserstein

    std::size_t size() const { return support.size(); }
    double total_weight() const;
    double total_variation() const;
    bool is_probability(double tol = 1e-9) const;
};

// Sorts by position and merges exactly coincident atoms.
AtomicMeasure make_atomic_measure(std::vector<double> points, std::vector<double> weights);

AtomicMeasure subtract(const AtomicMeasure& a, const AtomicMeasure& b);
AtomicMeasure scale(const AtomicMeasure& a, double factor);

// Exact 1D optimal transport cost^(1/p) by CDF matching on sorted atoms.
// Public API restricts p to {1, 2}; the _any variant accepts any p >= 1.
double wasserstein_p(const AtomicMeasure& mu, const AtomicMeasure& nu, double p);
double wasserstein_p_any(const AtomicMeasure& mu, const AtomicMeasure& nu, double p);

struct BLCertificate {
    std::vector<double> test_values;  // optimal zeta at the support points
    double lip_part = 0.0;            // s: Lipschitz budget actually used
    double sup_part = 0.0;            // t: sup-norm budget actually used
};

struct BLResult {
    double value = 0.0;
    BLCertificate certificate;
};

// sup { sum_i zeta(x_i) w_i : ||zeta||_inf + Lip(zeta) <= 1 }. In 1D the
// consecutive Lipschitz constraints imply all pairwise ones (piecewise linear
// interpolation extends zeta with the same constant); all_pairs adds the
// redundant constraints and exists for cross-checking that reduction.
BLResult bl_norm(const AtomicMeasure& mu, bool all_pairs = false);

// Homogeneous Lipschitz-dual norm sup { sum zeta(x_i) w_i : Lip(zeta) <= 1 }
// of a measure with zero net weight: the integral of |cumulative weight|.
// Finite only for balanced measures; this is the norm in which the momentum
// equation pairs with the identity test function.
double kr_norm(const AtomicMeasure& mu);

enum class CurveMetric { W2, BL };

struct TimedMeasure {
    double time = 0.0;
    AtomicMeasure measure;
};

// Max over consecutive samples of distance / dt; a lower bound for the
// Lipschitz seminorm of the sampled curve.
double curve_lipschitz_estimate(const std::vector<TimedMeasure>& samples, CurveMetric metric);

}  // namespace gasdyn
