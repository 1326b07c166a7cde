#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ncdrank/error.hpp"
#include "ncdrank/graph.hpp"
#include "ncdrank/matrix.hpp"

namespace ncdrank {

enum class DecompositionKind { Partition, Cover };

/// Indexed family of non-empty node blocks that together cover all nodes.
/// Blocks may overlap; `kind()` reports whether they happen to partition the
/// node set.
class Decomposition {
public:
    Decomposition(std::size_t node_count, std::vector<std::string> block_labels,
                  std::vector<std::vector<node_id>> members)
        : n_(node_count), block_labels_(std::move(block_labels)), members_(std::move(members)) {
        if (block_labels_.size() != members_.size())
            throw DimensionError("decomposition: label count differs from block count");
        if (members_.empty()) throw CoverageError("decomposition has no blocks");

        node_blocks_.assign(n_, {});
        for (std::size_t k = 0; k < members_.size(); ++k) {
            auto& block = members_[k];
            std::sort(block.begin(), block.end());
            block.erase(std::unique(block.begin(), block.end()), block.end());
            if (block.empty()) throw CoverageError("block '" + block_labels_[k] + "' is empty");
            for (const node_id u : block) {
                if (u >= n_) throw DimensionError("block member out of range");
                node_blocks_[u].push_back(static_cast<block_id>(k));
            }
        }
        bool partition = true;
        for (std::size_t u = 0; u < n_; ++u) {
            if (node_blocks_[u].empty())
                throw CoverageError("node " + std::to_string(u) + " belongs to no block");
            partition = partition && node_blocks_[u].size() == 1;
        }
        kind_ = partition ? DecompositionKind::Partition : DecompositionKind::Cover;
    }

    std::size_t node_count() const noexcept { return n_; }
    std::size_t block_count() const noexcept { return members_.size(); }

    const std::vector<std::string>& block_labels() const noexcept { return block_labels_; }
    const std::string& block_label(block_id k) const { return block_labels_.at(k); }

    /// Members of block k, ascending node id.
    const std::vector<node_id>& members(block_id k) const { return members_.at(k); }
    std::size_t block_size(block_id k) const { return members_.at(k).size(); }

    /// Blocks containing u, ascending block id.
    const std::vector<block_id>& node_blocks(node_id u) const { return node_blocks_.at(u); }

    DecompositionKind kind() const noexcept { return kind_; }
    bool is_partition() const noexcept { return kind_ == DecompositionKind::Partition; }

private:
    std::size_t n_;
    std::vector<std::string> block_labels_;
    std::vector<std::vector<node_id>> members_;
    std::vector<std::vector<block_id>> node_blocks_;
    DecompositionKind kind_ = DecompositionKind::Partition;
};

/// Reads "node_label block_label" lines. A node listed under several
/// blocks makes the decomposition a cover. Block ids follow first
/// appearance.
inline Decomposition parse_blocks(std::istream& in, const Graph& g) {
    std::vector<std::string> block_labels;
    std::unordered_map<std::string, block_id> index;
    std::vector<std::vector<node_id>> members;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = detail::tokenize_line(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 2)
            throw ParseError("expected 'node block', got " + std::to_string(tokens.size()) + " tokens", line_no);
        const auto u = g.find(tokens[0]);
        if (!u) throw ParseError("node '" + tokens[0] + "' is not in the graph", line_no);
        const auto [it, inserted] = index.emplace(tokens[1], static_cast<block_id>(block_labels.size()));
        if (inserted) {
            block_labels.push_back(tokens[1]);
            members.emplace_back();
        }
        members[it->second].push_back(*u);
    }

    std::vector<char> covered(g.size(), 0);
    for (const auto& block : members)
        for (const node_id u : block) covered[u] = 1;
    for (std::size_t u = 0; u < g.size(); ++u) {
        if (!covered[u]) throw CoverageError("node '" + g.label(static_cast<node_id>(u)) + "' belongs to no block");
    }
    return Decomposition(g.size(), std::move(block_labels), std::move(members));
}

inline Decomposition parse_blocks(std::string_view text, const Graph& g) {
    std::istringstream in{std::string(text)};
    return parse_blocks(in, g);
}

namespace detail {

inline void require_same_universe(const Decomposition& d, const Graph& g) {
    if (d.node_count() != g.size()) throw DimensionError("decomposition and graph have different node counts");
}

/// Appends the proximal blocks of u to `out` (unsorted) using `stamp` as a
/// visited marker indexed by block id; `stamp` entries equal to `mark` are
/// treated as already seen.
inline void collect_proximal(const Decomposition& d, const Graph& g, node_id u, std::vector<std::size_t>& stamp,
                             std::size_t mark, std::vector<block_id>& out) {
    auto visit = [&](node_id w) {
        for (const block_id k : d.node_blocks(w)) {
            if (stamp[k] != mark) {
                stamp[k] = mark;
                out.push_back(k);
            }
        }
    };
    visit(u);
    for (const node_id w : g.successors(u)) visit(w);
}

}  // namespace detail

/// Blocks containing u or any node u links to, ascending. Never empty.
inline std::vector<block_id> proximal_set(const Decomposition& d, const Graph& g, node_id u) {
    detail::require_same_universe(d, g);
    if (u >= g.size()) throw DimensionError("proximal_set: node id out of range");
    std::vector<std::size_t> stamp(d.block_count(), 0);
    std::vector<block_id> out;
    detail::collect_proximal(d, g, u, stamp, 1, out);
    std::sort(out.begin(), out.end());
    return out;
}

enum class FactorForm { PartitionForm, CoverForm };

/// Sparse factors of the inter-level proximity operator M = R * A.
///
/// PartitionForm: R = Gamma * Delta^-1 (Gamma_uJ = 1/N_u over proximal
/// blocks, Delta = diag of block sizes) and A holds 0/1 block indicator
/// rows. CoverForm: R and A are the row-normalized membership matrices
/// X (node -> proximal block) and Y (block -> member), so each factor is
/// row-stochastic on its own.
struct ProximityFactors {
    CsrMatrix R;                              // n x K
    CsrMatrix A;                              // K x n
    std::vector<std::size_t> proximal_count;  // N_u
    FactorForm form = FactorForm::CoverForm;

    std::size_t node_count() const noexcept { return R.rows(); }
    std::size_t block_count() const noexcept { return R.cols(); }
};

/// Builds the factors in the requested form. PartitionForm is only valid
/// for a partition; CoverForm accepts any decomposition.
inline ProximityFactors build_factors(const Decomposition& d, const Graph& g, FactorForm form) {
    detail::require_same_universe(d, g);
    if (form == FactorForm::PartitionForm && !d.is_partition())
        throw ConfigError("partition factors requested for an overlapping cover");

    const std::size_t n = g.size();
    const std::size_t K = d.block_count();
    ProximityFactors f;
    f.form = form;
    f.proximal_count.resize(n);

    CsrBuilder r(n, K);
    std::vector<std::size_t> stamp(K, 0);
    std::vector<block_id> prox;
    for (std::size_t u = 0; u < n; ++u) {
        prox.clear();
        detail::collect_proximal(d, g, static_cast<node_id>(u), stamp, u + 1, prox);
        std::sort(prox.begin(), prox.end());
        const double inv_n = 1.0 / static_cast<double>(prox.size());
        f.proximal_count[u] = prox.size();
        for (const block_id k : prox) {
            const double v = form == FactorForm::PartitionForm
                                 ? inv_n / static_cast<double>(d.block_size(k))
                                 : inv_n;
            r.push(k, v);
        }
        r.end_row();
    }
    f.R = std::move(r).finish();

    CsrBuilder a(K, n);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& block = d.members(static_cast<block_id>(k));
        const double v = form == FactorForm::PartitionForm ? 1.0 : 1.0 / static_cast<double>(block.size());
        for (const node_id u : block) a.push(u, v);
        a.end_row();
    }
    f.A = std::move(a).finish();
    return f;
}

/// PartitionForm for partitions, CoverForm otherwise.
inline ProximityFactors build_factors(const Decomposition& d, const Graph& g) {
    return build_factors(d, g, d.is_partition() ? FactorForm::PartitionForm : FactorForm::CoverForm);
}

inline constexpr std::size_t default_materialize_cap = 2000;

/// Dense M = R * A. Debug and test use only.
inline DenseMatrix materialize_m(const ProximityFactors& f, std::size_t cap = default_materialize_cap) {
    if (f.node_count() > cap)
        throw CapExceededError("refusing to materialize a " + std::to_string(f.node_count()) +
                               "-node operator (cap " + std::to_string(cap) + ")");
    return (f.R * f.A).to_dense();
}

/// K x K indicator matrix W = A * R. Stored sparse; the stored entries are
/// exactly the positive ones.
class IndicatorMatrix {
public:
    explicit IndicatorMatrix(CsrMatrix w) : w_(std::move(w)) {
        if (w_.rows() != w_.cols()) throw DimensionError("indicator matrix must be square");
    }

    std::size_t size() const noexcept { return w_.rows(); }
    const CsrMatrix& weights() const noexcept { return w_; }
    double operator()(std::size_t i, std::size_t j) const { return w_.at(i, j); }
    bool positive(std::size_t i, std::size_t j) const { return w_.at(i, j) > 0.0; }
    DenseMatrix dense() const { return w_.to_dense(); }

private:
    CsrMatrix w_;
};

inline IndicatorMatrix indicator(const ProximityFactors& f) { return IndicatorMatrix(f.A * f.R); }

}  // namespace ncdrank
