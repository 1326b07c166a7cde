#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ncdrank/decomposition.hpp"
#include "ncdrank/error.hpp"
#include "ncdrank/matrix.hpp"

namespace ncdrank {

/// Strongly connected components of a positivity pattern. Each component
/// is sorted ascending and components are ordered by their smallest index.
struct SccResult {
    std::vector<std::vector<std::size_t>> components;

    std::size_t count() const noexcept { return components.size(); }
    bool irreducible() const noexcept { return components.size() == 1; }
};

namespace detail {

inline void require_nonnegative(std::span<const double> values) {
    for (const double v : values)
        if (v < 0.0 || std::isnan(v)) throw DomainError("matrix has a negative or NaN entry");
}

/// Iterative Tarjan over the pattern {(i,j) : m_ij > 0}. O(n + nnz).
inline SccResult tarjan_scc(const CsrMatrix& m) {
    const std::size_t n = m.rows();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    struct Frame {
        std::size_t node;
        std::size_t next;  // position in the CSR row
    };
    std::vector<Frame> call;
    SccResult out;
    std::size_t counter = 0;

    const auto& ptr = m.row_ptr();
    const auto& col = m.col_idx();
    const auto& val = m.values();

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        call.push_back({root, ptr[root]});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;

        while (!call.empty()) {
            Frame& f = call.back();
            const std::size_t v = f.node;
            if (f.next < ptr[v + 1]) {
                const std::size_t p = f.next++;
                if (!(val[p] > 0.0)) continue;
                const std::size_t w = col[p];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, ptr[w]});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                out.components.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                const std::size_t parent = call.back().node;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    std::sort(out.components.begin(), out.components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

inline CsrMatrix positive_pattern(const DenseMatrix& m) {
    CsrBuilder b(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) > 0.0) b.push(static_cast<std::uint32_t>(j), 1.0);
        b.end_row();
    }
    return std::move(b).finish();
}

/// Square boolean matrix with rows packed into 64-bit words.
class BitMatrix {
public:
    explicit BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

    void set(std::size_t i, std::size_t j) { bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }
    bool get(std::size_t i, std::size_t j) const { return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U; }

    friend BitMatrix operator*(const BitMatrix& a, const BitMatrix& b) {
        BitMatrix c(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i) {
            std::uint64_t* ci = c.bits_.data() + i * c.words_;
            for (std::size_t k = 0; k < a.n_; ++k) {
                if (!a.get(i, k)) continue;
                const std::uint64_t* bk = b.bits_.data() + k * b.words_;
                for (std::size_t w = 0; w < c.words_; ++w) ci[w] |= bk[w];
            }
        }
        return c;
    }

    bool all_set() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (!get(i, j)) return false;
        return true;
    }

private:
    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

}  // namespace detail

inline SccResult is_irreducible(const CsrMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("is_irreducible: matrix is not square");
    detail::require_nonnegative(m.values());
    return detail::tarjan_scc(m);
}

inline SccResult is_irreducible(const DenseMatrix& m) {
    if (!m.square()) throw DimensionError("is_irreducible: matrix is not square");
    for (std::size_t i = 0; i < m.rows(); ++i) detail::require_nonnegative(m.row(i));
    return detail::tarjan_scc(detail::positive_pattern(m));
}

inline constexpr std::size_t default_primitivity_cap = 512;

/// Wielandt test: a non-negative k x k matrix is primitive iff its
/// (k^2 - 2k + 2)-th power is entrywise positive. Works on the boolean
/// pattern only, so magnitudes cannot under- or overflow.
inline bool is_primitive(const DenseMatrix& m, std::size_t cap = default_primitivity_cap) {
    if (!m.square()) throw DimensionError("is_primitive: matrix is not square");
    const std::size_t k = m.rows();
    if (k > cap)
        throw CapExceededError("is_primitive: order " + std::to_string(k) + " exceeds cap " + std::to_string(cap));
    if (k == 0) return false;
    detail::BitMatrix base(k);
    for (std::size_t i = 0; i < k; ++i) {
        detail::require_nonnegative(m.row(i));
        for (std::size_t j = 0; j < k; ++j)
            if (m(i, j) > 0.0) base.set(i, j);
    }
    std::size_t exponent = k * k - 2 * k + 2;
    detail::BitMatrix result = base;
    --exponent;
    while (exponent > 0) {
        if (exponent & 1U) result = result * base;
        exponent >>= 1U;
        if (exponent > 0) base = base * base;
    }
    return result.all_set();
}

inline bool is_primitive(const CsrMatrix& m, std::size_t cap = default_primitivity_cap) {
    if (m.rows() > cap)
        throw CapExceededError("is_primitive: order " + std::to_string(m.rows()) + " exceeds cap " +
                               std::to_string(cap));
    return is_primitive(m.to_dense(), cap);
}

/// Outcome of the teleportation-free admission check on W.
struct CheckReport {
    bool irreducible = false;
    /// P = eta*H + mu*M (eta, mu > 0, eta + mu = 1) is primitive iff W is
    /// irreducible.
    bool primitive_guarantee = false;
    std::size_t scc_count = 0;
    /// Block-id SCCs of W; empty when W is irreducible.
    std::vector<std::vector<std::size_t>> blocking_components;
};

inline CheckReport teleportation_free_check(const IndicatorMatrix& w) {
    SccResult scc = is_irreducible(w.weights());
    CheckReport r;
    r.scc_count = scc.count();
    r.irreducible = scc.irreducible();
    r.primitive_guarantee = r.irreducible;
    if (!r.irreducible) r.blocking_components = std::move(scc.components);
    return r;
}

/// Stationary vector of a dense row-stochastic matrix by power iteration
/// from the uniform vector. Stops once ||pi P - pi||_1 <= tol and returns
/// pi P (renormalized). Oracle for tests and small problems.
inline std::vector<double> dense_stationary(const DenseMatrix& p, double tol, std::size_t max_iter,
                                            std::size_t cap = default_materialize_cap) {
    if (!p.square()) throw DimensionError("dense_stationary: matrix is not square");
    const std::size_t n = p.rows();
    if (n == 0) throw DimensionError("dense_stationary: empty matrix");
    if (n > cap) throw CapExceededError("dense_stationary: order exceeds cap");
    if (!(tol > 0.0)) throw ConfigError("dense_stationary: tol must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        detail::require_nonnegative(p.row(i));
        double s = 0.0;
        for (const double v : p.row(i)) s += v;
        if (std::abs(s - 1.0) > 1e-10) throw DomainError("dense_stationary: row " + std::to_string(i) + " does not sum to 1");
    }

    std::vector<double> pi(n, 1.0 / static_cast<double>(n));
    double residual = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<double> next = p.left_multiply(pi);
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) residual += std::abs(next[i] - pi[i]);
        double sum = 0.0;
        for (const double v : next) sum += v;
        for (double& v : next) v /= sum;
        pi = std::move(next);
        if (residual <= tol) return pi;
    }
    throw ConvergenceError("dense_stationary: no convergence after " + std::to_string(max_iter) + " iterations",
                           residual);
}

}  // namespace ncdrank
