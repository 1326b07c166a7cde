#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ncdrank/error.hpp"

namespace ncdrank {

using node_id = std::uint32_t;
using block_id = std::uint32_t;

namespace detail {

/// Splits one input line into whitespace-separated tokens. Returns an empty
/// list for blank lines and for comment lines (first non-blank char '#').
inline std::vector<std::string> tokenize_line(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        if (tokens.empty() && tok.front() == '#') return {};
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

}  // namespace detail

/// Immutable directed graph in CSR form. Node ids are dense in [0, n) and
/// map one-to-one onto the original labels.
class Graph {
public:
    /// Builds the graph from labels and an edge list over ids. Duplicate
    /// edges collapse to one; self-loops are kept and count toward the
    /// out-degree.
    Graph(std::vector<std::string> labels, std::vector<std::pair<node_id, node_id>> edges)
        : labels_(std::move(labels)) {
        const std::size_t n = labels_.size();
        if (n == 0) throw ParseError("empty graph");
        for (std::size_t i = 0; i < n; ++i) {
            if (!index_.emplace(labels_[i], static_cast<node_id>(i)).second)
                throw ParseError("duplicate node label '" + labels_[i] + "'");
        }
        for (const auto& [u, v] : edges) {
            if (u >= n || v >= n) throw DimensionError("edge endpoint out of range");
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        row_ptr_.assign(n + 1, 0);
        for (const auto& e : edges) ++row_ptr_[e.first + 1];
        for (std::size_t u = 0; u < n; ++u) row_ptr_[u + 1] += row_ptr_[u];
        targets_.reserve(edges.size());
        for (const auto& e : edges) targets_.push_back(e.second);

        for (std::size_t u = 0; u < n; ++u)
            if (out_degree(static_cast<node_id>(u)) == 0) dangling_.push_back(static_cast<node_id>(u));
    }

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t edge_count() const noexcept { return targets_.size(); }

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(node_id u) const { return labels_.at(u); }

    std::optional<node_id> find(std::string_view label) const {
        const auto it = index_.find(std::string(label));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t out_degree(node_id u) const { return row_ptr_[u + 1] - row_ptr_[u]; }

    /// Targets of u's out-edges, sorted by id.
    std::span<const node_id> successors(node_id u) const {
        return {targets_.data() + row_ptr_[u], row_ptr_[u + 1] - row_ptr_[u]};
    }

    bool has_edge(node_id u, node_id v) const {
        const auto s = successors(u);
        return std::binary_search(s.begin(), s.end(), v);
    }

    /// Nodes with out-degree zero, ascending.
    const std::vector<node_id>& dangling() const noexcept { return dangling_; }
    bool is_dangling(node_id u) const { return out_degree(u) == 0; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, node_id> index_;
    std::vector<std::size_t> row_ptr_;
    std::vector<node_id> targets_;
    std::vector<node_id> dangling_;
};

/// Reads "src dst" lines. Ids follow first appearance (src before dst on
/// the same line). Lines whose first non-blank character is '#' are
/// comments.
inline Graph parse_edge_list(std::istream& in) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, node_id> index;
    std::vector<std::pair<node_id, node_id>> edges;
    auto intern = [&](const std::string& label) {
        const auto [it, inserted] = index.emplace(label, static_cast<node_id>(labels.size()));
        if (inserted) labels.push_back(label);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = detail::tokenize_line(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 2)
            throw ParseError("expected 'src dst', got " + std::to_string(tokens.size()) + " tokens", line_no);
        const node_id u = intern(tokens[0]);
        const node_id v = intern(tokens[1]);
        edges.emplace_back(u, v);
    }
    if (labels.empty()) throw ParseError("empty graph");
    return Graph(std::move(labels), std::move(edges));
}

inline Graph parse_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_edge_list(in);
}

}  // namespace ncdrank
