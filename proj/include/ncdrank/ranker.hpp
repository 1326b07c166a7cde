#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iterator>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncdrank/decomposition.hpp"
#include "ncdrank/error.hpp"
#include "ncdrank/hyperlink.hpp"
#include "ncdrank/spectra.hpp"

namespace ncdrank {

/// Weights of P = eta*H + mu*M + teleport*e*v^T.
struct RankParams {
    double eta = 0.85;
    double mu = 0.15;
    double teleport = 0.0;
    /// Teleportation distribution v; uniform when absent.
    std::optional<std::vector<double>> personalization;
    /// Stop once the L1 distance between successive iterates is <= tol.
    double tol = 1e-9;
    std::size_t max_iter = 1000;
    /// With teleport == 0, refuse to rank unless the indicator matrix is
    /// irreducible.
    bool strict = true;

    void validate(std::size_t n) const {
        if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
        if (!(mu >= 0.0 && mu < 1.0)) throw ConfigError("mu must lie in [0, 1)");
        if (!(teleport >= 0.0)) throw ConfigError("teleport must be non-negative");
        if (std::abs(eta + mu + teleport - 1.0) > 1e-12) throw ConfigError("eta + mu + teleport must equal 1");
        if (!(tol > 0.0)) throw ConfigError("tol must be positive");
        if (max_iter == 0) throw ConfigError("max_iter must be positive");
        if (personalization) {
            const auto& v = *personalization;
            if (v.size() != n) throw DimensionError("personalization length differs from node count");
            double sum = 0.0;
            for (const double x : v) {
                if (!(x >= 0.0)) throw ConfigError("personalization entries must be non-negative");
                sum += x;
            }
            if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("personalization must sum to 1");
            if (teleport > 0.0 && *std::min_element(v.begin(), v.end()) <= 0.0)
                throw ConfigError("personalization must be strictly positive when teleport > 0");
        }
    }
};

struct RankResult {
    std::vector<double> scores;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

namespace detail {

/// x_{k+1} = step(x_k) renormalized to sum 1, from the uniform vector.
inline RankResult power_iterate(std::size_t n, double tol, std::size_t max_iter,
                                const std::function<void(std::span<const double>, std::span<double>)>& step) {
    RankResult r;
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    std::vector<double> y(n);
    while (r.iterations < max_iter) {
        std::fill(y.begin(), y.end(), 0.0);
        step(x, y);
        double sum = 0.0;
        for (const double v : y) sum += v;
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] /= sum;
            residual += std::abs(y[i] - x[i]);
        }
        std::swap(x, y);
        ++r.iterations;
        r.residual = residual;
        if (residual <= tol) {
            r.converged = true;
            break;
        }
    }
    r.scores = std::move(x);
    return r;
}

}  // namespace detail

/// Stationary vector of P = eta*H + mu*R*A + teleport*e*v^T by sparse power
/// iteration. M is never formed: each step costs O(nnz(H) + nnz(R) + nnz(A)).
///
/// Without teleportation and in strict mode the indicator matrix must be
/// irreducible (otherwise a ReducibleError lists the block SCCs), since only
/// then is P primitive with a unique, strictly positive stationary vector.
/// Non-convergence is reported through RankResult::converged.
inline RankResult rank(const HyperlinkOperator& h, const ProximityFactors& f, const RankParams& p) {
    const std::size_t n = h.size();
    if (f.node_count() != n) throw DimensionError("rank: hyperlink and proximity factors differ in size");
    p.validate(n);

    if (p.teleport == 0.0 && p.strict) {
        if (p.mu == 0.0) throw ConfigError("teleportation-free ranking needs mu > 0");
        const CheckReport check = teleportation_free_check(indicator(f));
        if (!check.irreducible)
            throw ReducibleError("indicator matrix is reducible (" + std::to_string(check.scc_count) +
                                     " components); teleportation-free ranking is not well-defined",
                                 check.blocking_components);
    }

    const double uniform = 1.0 / static_cast<double>(n);
    std::vector<double> block_mass(f.block_count());
    return detail::power_iterate(n, p.tol, p.max_iter, [&](std::span<const double> x, std::span<double> y) {
        h.apply_add(x, y, p.eta);
        if (p.mu > 0.0) {
            std::fill(block_mass.begin(), block_mass.end(), 0.0);
            f.R.left_multiply_add(x, block_mass);
            f.A.left_multiply_add(block_mass, y, p.mu);
        }
        if (p.teleport > 0.0) {
            if (p.personalization) {
                const auto& v = *p.personalization;
                for (std::size_t i = 0; i < n; ++i) y[i] += p.teleport * v[i];
            } else {
                for (double& yi : y) yi += p.teleport * uniform;
            }
        }
    });
}

/// max_u |sum_v P_uv - 1| for the implied P, computed from the factors
/// without forming M: row u of R*A sums to sum_k R_uk * rowsum(A_k).
inline double implied_row_sum_error(const HyperlinkOperator& h, const ProximityFactors& f, const RankParams& p) {
    if (f.node_count() != h.size()) throw DimensionError("implied_row_sum_error: size mismatch");
    const auto a_sums = f.A.row_sums();
    double err = 0.0;
    const auto& rows = h.rows();
    const double uniform_share = 1.0 / static_cast<double>(h.size());
    std::vector<char> implicit(h.size(), 0);
    for (const node_id u : h.implicit_dangling()) implicit[u] = 1;
    for (std::size_t u = 0; u < h.size(); ++u) {
        double hs = 0.0;
        if (implicit[u]) {
            for (std::size_t j = 0; j < h.size(); ++j) hs += uniform_share;
        } else {
            for (const double v : rows.row_values(u)) hs += v;
        }
        double ms = 0.0;
        const auto idx = f.R.row_indices(u);
        const auto val = f.R.row_values(u);
        for (std::size_t q = 0; q < idx.size(); ++q) ms += val[q] * a_sums[idx[q]];
        err = std::max(err, std::abs(p.eta * hs + p.mu * ms + p.teleport - 1.0));
    }
    return err;
}

/// Stationary vector of alpha*H + (1 - alpha)*e*v^T.
inline RankResult pagerank(const HyperlinkOperator& h, double alpha, std::span<const double> v, double tol = 1e-9,
                           std::size_t max_iter = 1000) {
    const std::size_t n = h.size();
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
    if (v.size() != n) throw DimensionError("pagerank: teleport vector length differs from node count");
    double sum = 0.0;
    for (const double x : v) {
        if (!(x > 0.0)) throw ConfigError("pagerank: teleport vector must be strictly positive");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("pagerank: teleport vector must sum to 1");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iter == 0) throw ConfigError("max_iter must be positive");

    return detail::power_iterate(n, tol, max_iter, [&](std::span<const double> x, std::span<double> y) {
        h.apply_add(x, y, alpha);
        for (std::size_t i = 0; i < n; ++i) y[i] += (1.0 - alpha) * v[i];
    });
}

inline RankResult pagerank(const HyperlinkOperator& h, double alpha, double tol = 1e-9, std::size_t max_iter = 1000) {
    const std::vector<double> v(h.size(), 1.0 / static_cast<double>(h.size()));
    return pagerank(h, alpha, v, tol, max_iter);
}

/// Node ids by descending score, ties by ascending label.
inline std::vector<node_id> ranking_order(std::span<const double> scores, const std::vector<std::string>& labels) {
    if (scores.size() != labels.size()) throw DimensionError("ranking_order: scores and labels differ in length");
    std::vector<node_id> order(scores.size());
    std::iota(order.begin(), order.end(), node_id{0});
    std::sort(order.begin(), order.end(), [&](node_id a, node_id b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return labels[a] < labels[b];
    });
    return order;
}

struct ComparisonReport {
    double l1 = 0.0;
    /// |topk(a) ∩ topk(b)| / k
    double overlap = 0.0;
    std::size_t k = 0;
    /// Requested k exceeded n and was clipped.
    bool clipped = false;
    std::vector<node_id> top_a;
    std::vector<node_id> top_b;
};

inline ComparisonReport compare(const RankResult& a, const RankResult& b, const std::vector<std::string>& labels,
                                std::size_t k) {
    const std::size_t n = a.scores.size();
    if (b.scores.size() != n || labels.size() != n) throw DimensionError("compare: node universes differ");
    if (k == 0) throw ConfigError("compare: k must be positive");

    ComparisonReport r;
    for (std::size_t i = 0; i < n; ++i) r.l1 += std::abs(a.scores[i] - b.scores[i]);
    r.clipped = k > n;
    r.k = std::min(k, n);
    r.top_a = ranking_order(a.scores, labels);
    r.top_b = ranking_order(b.scores, labels);
    r.top_a.resize(r.k);
    r.top_b.resize(r.k);

    std::vector<node_id> sa = r.top_a, sb = r.top_b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::vector<node_id> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    r.overlap = static_cast<double>(common.size()) / static_cast<double>(r.k);
    return r;
}

}  // namespace ncdrank
