#include "gasdyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gasdyn/simplex.hpp"

namespace gasdyn {

double AtomicMeasure::total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double AtomicMeasure::total_variation() const {
    double tv = 0.0;
    for (double w : weights) tv += std::abs(w);
    return tv;
}

bool AtomicMeasure::is_probability(double tol) const {
    for (double w : weights)
        if (w < -tol) return false;
    return std::abs(total_weight() - 1.0) <= tol;
}

AtomicMeasure make_atomic_measure(std::vector<double> points, std::vector<double> weights) {
    if (points.size() != weights.size())
        throw std::invalid_argument("atomic measure: points/weights size mismatch");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    AtomicMeasure out;
    out.support.reserve(points.size());
    out.weights.reserve(points.size());
    for (std::size_t k : order) {
        if (!std::isfinite(points[k]) || !std::isfinite(weights[k]))
            throw std::invalid_argument("atomic measure: non-finite entry");
        if (!out.support.empty() && points[k] == out.support.back()) {
            out.weights.back() += weights[k];
        } else {
            out.support.push_back(points[k]);
            out.weights.push_back(weights[k]);
        }
    }
    return out;
}

AtomicMeasure subtract(const AtomicMeasure& a, const AtomicMeasure& b) {
    std::vector<double> pts(a.support);
    std::vector<double> w(a.weights);
    pts.insert(pts.end(), b.support.begin(), b.support.end());
    for (double v : b.weights) w.push_back(-v);
    return make_atomic_measure(std::move(pts), std::move(w));
}

AtomicMeasure scale(const AtomicMeasure& a, double factor) {
    AtomicMeasure out = a;
    for (double& w : out.weights) w *= factor;
    return out;
}

double wasserstein_p_any(const AtomicMeasure& mu, const AtomicMeasure& nu, double p) {
    if (!(p >= 1.0)) throw std::domain_error("wasserstein: p must be >= 1");
    if (!mu.is_probability() || !nu.is_probability())
        throw std::domain_error("wasserstein: inputs must be probability measures");
    if (mu.size() == 0 || nu.size() == 0)
        throw std::domain_error("wasserstein: empty measure");

    // Quantile matching: walk both CDFs and pair mass in order.
    double cost = 0.0;
    std::size_t i = 0, j = 0;
    double need_i = mu.weights[0], need_j = nu.weights[0];
    while (i < mu.size() && j < nu.size()) {
        const double delta = std::min(need_i, need_j);
        if (delta > 0.0)
            cost += delta * std::pow(std::abs(mu.support[i] - nu.support[j]), p);
        need_i -= delta;
        need_j -= delta;
        if (need_i <= 0.0) {
            ++i;
            if (i < mu.size()) need_i = mu.weights[i];
        }
        if (need_j <= 0.0) {
            ++j;
            if (j < nu.size()) need_j = nu.weights[j];
        }
    }
    return std::pow(cost, 1.0 / p);
}

double wasserstein_p(const AtomicMeasure& mu, const AtomicMeasure& nu, double p) {
    if (p != 1.0 && p != 2.0)
        throw std::domain_error("wasserstein: public API supports p in {1, 2}");
    return wasserstein_p_any(mu, nu, p);
}

BLResult bl_norm(const AtomicMeasure& mu, bool all_pairs) {
    BLResult out;
    const std::size_t n = mu.size();
    bool all_zero = true;
    for (double w : mu.weights)
        if (w != 0.0) all_zero = false;
    if (n == 0 || all_zero) {
        out.certificate.test_values.assign(n, 0.0);
        return out;
    }

    // Variables: zeta_0..zeta_{n-1} (free), s (Lipschitz part), t (sup part).
    lp::Problem prob;
    for (std::size_t i = 0; i < n; ++i) prob.add_var(mu.weights[i], /*is_free=*/true);
    const std::size_t vs = prob.add_var(0.0);
    const std::size_t vt = prob.add_var(0.0);
    const std::size_t nv = n + 2;

    auto row = [&](std::initializer_list<std::pair<std::size_t, double>> entries) {
        std::vector<double> c(nv, 0.0);
        for (const auto& e : entries) c[e.first] = e.second;
        return c;
    };

    for (std::size_t i = 0; i < n; ++i) {
        prob.add_row(row({{i, 1.0}, {vt, -1.0}}), lp::Rel::LE, 0.0);
        prob.add_row(row({{i, -1.0}, {vt, -1.0}}), lp::Rel::LE, 0.0);
    }
    auto add_lip = [&](std::size_t i, std::size_t j) {
        const double gap = mu.support[j] - mu.support[i];
        prob.add_row(row({{j, 1.0}, {i, -1.0}, {vs, -gap}}), lp::Rel::LE, 0.0);
        prob.add_row(row({{i, 1.0}, {j, -1.0}, {vs, -gap}}), lp::Rel::LE, 0.0);
    };
    if (all_pairs) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) add_lip(i, j);
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) add_lip(i, i + 1);
    }
    {
        std::vector<double> c(nv, 0.0);
        c[vs] = 1.0;
        c[vt] = 1.0;
        prob.add_row(std::move(c), lp::Rel::LE, 1.0);
    }

    lp::Solution sol = lp::solve(prob);
    if (sol.status != lp::Status::Optimal)
        throw std::runtime_error("bl_norm: LP did not reach optimality");

    out.value = sol.value;
    out.certificate.test_values.assign(sol.x.begin(), sol.x.begin() + n);
    out.certificate.lip_part = sol.x[vs];
    out.certificate.sup_part = sol.x[vt];
    return out;
}

double kr_norm(const AtomicMeasure& mu) {
    const std::size_t n = mu.size();
    if (n == 0) return 0.0;
    const double net = mu.total_weight();
    if (std::abs(net) > 1e-9 * std::max(1.0, mu.total_variation()))
        throw std::domain_error("kr_norm: measure must have zero net weight");
    double value = 0.0;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cum += mu.weights[i];
        value += std::abs(cum) * (mu.support[i + 1] - mu.support[i]);
    }
    return value;
}

double curve_lipschitz_estimate(const std::vector<TimedMeasure>& samples, CurveMetric metric) {
    if (samples.size() < 2)
        throw std::domain_error("curve_lipschitz_estimate: need at least 2 samples");
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        const double dt = samples[k + 1].time - samples[k].time;
        if (!(dt > 0.0))
            throw std::domain_error("curve_lipschitz_estimate: times must increase");
        double dist = 0.0;
        if (metric == CurveMetric::W2) {
            dist = wasserstein_p(samples[k].measure, samples[k + 1].measure, 2.0);
        } else {
            dist = bl_norm(subtract(samples[k + 1].measure, samples[k].measure)).value;
        }
        worst = std::max(worst, dist / dt);
    }
    return worst;
}

}  // namespace gasdyn
