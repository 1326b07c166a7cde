#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ncdrank/decomposition.hpp"
#include "ncdrank/error.hpp"
#include "ncdrank/graph.hpp"
#include "ncdrank/matrix.hpp"

namespace ncdrank {

/// Stochasticity fix for nodes without out-links.
///   OwnBlock   - uniform over the members of the node's own block(s).
///                Keeps every zero of M a zero of H.
///   UniformAll - uniform over all n nodes (classic PageRank fix).
enum class DanglingPolicy { OwnBlock, UniformAll };

/// Row-stochastic hyperlink operator H. Link rows hold 1/d_u on the
/// successors of u. Under OwnBlock the dangling rows are stored explicitly;
/// under UniformAll they are kept implicit and applied as a rank-one
/// correction.
class HyperlinkOperator {
public:
    HyperlinkOperator(CsrMatrix rows, DanglingPolicy policy, std::vector<node_id> implicit_dangling)
        : rows_(std::move(rows)), policy_(policy), implicit_dangling_(std::move(implicit_dangling)) {}

    std::size_t size() const noexcept { return rows_.rows(); }
    DanglingPolicy policy() const noexcept { return policy_; }

    /// Explicitly stored rows; implicit uniform rows are empty here.
    const CsrMatrix& rows() const noexcept { return rows_; }
    const std::vector<node_id>& implicit_dangling() const noexcept { return implicit_dangling_; }

    /// y += scale * x^T H
    void apply_add(std::span<const double> x, std::span<double> y, double scale = 1.0) const {
        if (x.size() != size() || y.size() != size()) throw DimensionError("hyperlink apply: length mismatch");
        rows_.left_multiply_add(x, y, scale);
        if (implicit_dangling_.empty()) return;
        double mass = 0.0;
        for (const node_id u : implicit_dangling_) mass += x[u];
        const double share = scale * mass / static_cast<double>(size());
        if (share == 0.0) return;
        for (double& v : y) v += share;
    }

    DenseMatrix to_dense() const {
        DenseMatrix d = rows_.to_dense();
        const double u = 1.0 / static_cast<double>(size());
        for (const node_id i : implicit_dangling_)
            for (std::size_t j = 0; j < size(); ++j) d(i, j) = u;
        return d;
    }

    /// max_u |sum_v H_uv - 1|
    double max_row_sum_error() const {
        auto sums = rows_.row_sums();
        if (!implicit_dangling_.empty()) {
            const double u = 1.0 / static_cast<double>(size());
            double uniform_sum = 0.0;
            for (std::size_t j = 0; j < size(); ++j) uniform_sum += u;
            for (const node_id i : implicit_dangling_) sums[i] = uniform_sum;
        }
        double err = 0.0;
        for (const double s : sums) err = std::max(err, std::abs(s - 1.0));
        return err;
    }

private:
    CsrMatrix rows_;
    DanglingPolicy policy_;
    std::vector<node_id> implicit_dangling_;
};

inline HyperlinkOperator build_hyperlink(const Graph& g, DanglingPolicy policy,
                                         const Decomposition* decomp = nullptr) {
    if (policy == DanglingPolicy::OwnBlock) {
        if (decomp == nullptr) throw ConfigError("OwnBlock dangling policy requires a decomposition");
        if (decomp->node_count() != g.size())
            throw DimensionError("decomposition and graph have different node counts");
    }
    const std::size_t n = g.size();
    CsrBuilder b(n, n);
    std::vector<node_id> implicit;
    std::vector<node_id> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const auto u = static_cast<node_id>(i);
        const auto succ = g.successors(u);
        if (!succ.empty()) {
            const double w = 1.0 / static_cast<double>(succ.size());
            for (const node_id v : succ) b.push(v, w);
        } else if (policy == DanglingPolicy::UniformAll) {
            implicit.push_back(u);
        } else {
            scratch.clear();
            for (const block_id k : decomp->node_blocks(u)) {
                const auto& m = decomp->members(k);
                scratch.insert(scratch.end(), m.begin(), m.end());
            }
            std::sort(scratch.begin(), scratch.end());
            scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
            const double w = 1.0 / static_cast<double>(scratch.size());
            for (const node_id v : scratch) b.push(v, w);
        }
        b.end_row();
    }
    return HyperlinkOperator(std::move(b).finish(), policy, std::move(implicit));
}

inline HyperlinkOperator build_hyperlink(const Graph& g, DanglingPolicy policy, const Decomposition& decomp) {
    return build_hyperlink(g, policy, &decomp);
}

/// x^T H as if H were dense.
inline std::vector<double> hyperlink_apply(const HyperlinkOperator& h, std::span<const double> x) {
    if (x.size() != h.size()) throw DimensionError("hyperlink_apply: vector length differs from node count");
    std::vector<double> y(h.size(), 0.0);
    h.apply_add(x, y);
    return y;
}

}  // namespace ncdrank
