#include "gasdyn/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gasdyn {

double default_compare_tol(const AccelerationProfile& p, const AccelerationProfile& q) {
    double peak = 0.0;
    for (double v : p.values) peak = std::max(peak, std::abs(v));
    for (double v : q.values) peak = std::max(peak, std::abs(v));
    return 1e-9 * (1.0 + peak);
}

Comparison compare(const AccelerationProfile& p, const AccelerationProfile& q, double tol) {
    if (p.times.size() != q.times.size() || p.values.size() != q.values.size() ||
        p.times != q.times)
        throw std::domain_error("compare: profiles must share the time grid");
    bool le = true, ge = true;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (p.values[i] > q.values[i] + tol) le = false;
        if (q.values[i] > p.values[i] + tol) ge = false;
    }
    if (le && ge) return Comparison::Equivalent;
    if (le) return Comparison::LessEq;
    if (ge) return Comparison::GreaterEq;
    return Comparison::Incomparable;
}

namespace {

// Strict Pareto domination: q <= m everywhere, q < m beyond tol somewhere.
bool dominates(const AccelerationProfile& q, const AccelerationProfile& m, double tol) {
    bool strictly = false;
    for (std::size_t i = 0; i < q.values.size(); ++i) {
        if (q.values[i] > m.values[i] + tol) return false;
        if (q.values[i] < m.values[i] - tol) strictly = true;
    }
    return strictly;
}

}  // namespace

std::vector<std::string> minimal_elements(const Ensemble& ens, SelectionObjective obj,
                                          double tol) {
    if (ens.members.empty()) throw std::domain_error("minimal_elements: empty ensemble");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ens.members.size(); ++i) {
        bool minimal = true;
        for (std::size_t j = 0; j < ens.members.size() && minimal; ++j) {
            if (i == j) continue;
            if (dominates(ens.profile(j, obj), ens.profile(i, obj), tol)) minimal = false;
        }
        if (minimal) out.push_back(ens.members[i].run_id);
    }
    return out;
}

std::vector<std::string> maximal_chain(const Ensemble& ens, SelectionObjective obj,
                                       double tol) {
    if (ens.members.empty()) return {};
    std::vector<std::size_t> order(ens.members.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ens.members[a].run_id < ens.members[b].run_id;
    });

    std::vector<std::size_t> chain;
    for (std::size_t i : order) {
        bool comparable = true;
        for (std::size_t j : chain) {
            if (compare(ens.profile(i, obj), ens.profile(j, obj), tol) ==
                Comparison::Incomparable) {
                comparable = false;
                break;
            }
        }
        if (comparable) chain.push_back(i);
    }
    // Order the chain by the relation itself (ascending), ties by run_id.
    std::sort(chain.begin(), chain.end(), [&](std::size_t a, std::size_t b) {
        const Comparison c = compare(ens.profile(a, obj), ens.profile(b, obj), tol);
        if (c == Comparison::LessEq) return true;
        if (c == Comparison::GreaterEq) return false;
        return ens.members[a].run_id < ens.members[b].run_id;
    });
    std::vector<std::string> out;
    for (std::size_t i : chain) out.push_back(ens.members[i].run_id);
    return out;
}

AccelerationProfile resample(const AccelerationProfile& p,
                             const std::vector<double>& grid) {
    if (p.times.empty()) throw std::domain_error("resample: empty profile");
    AccelerationProfile out;
    out.run_id = p.run_id;
    out.times = grid;
    out.values.reserve(grid.size());
    for (double t : grid) {
        if (t <= p.times.front()) {
            out.values.push_back(p.values.front());
        } else if (t >= p.times.back()) {
            out.values.push_back(p.values.back());
        } else {
            const auto it = std::upper_bound(p.times.begin(), p.times.end(), t);
            const std::size_t j = (std::size_t)(it - p.times.begin());
            const double t0 = p.times[j - 1], t1 = p.times[j];
            const double w = (t - t0) / (t1 - t0);
            out.values.push_back((1.0 - w) * p.values[j - 1] + w * p.values[j]);
        }
    }
    return out;
}

}  // namespace gasdyn
