#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pdi/common.hpp"

namespace pdi {

// F ⊆ {1..n}, members sorted strictly increasing (1-based).
struct SubsetIndex {
    int n = 0;
    std::vector<int> members;
};

// Set partition π of {1..n}: disjoint nonempty blocks covering {1..n}.
struct Partition {
    int n = 0;
    std::vector<SubsetIndex> blocks;
};

// Bell numbers via B_{n+1} = Σ_j C(n,j) B_j; exact in 64 bits for n ≤ 12.
inline std::uint64_t bell(int n) {
    if (n < 0 || n > 12) throw std::out_of_range("bell: n must be in [0, 12]");
    std::vector<std::uint64_t> b{1};
    for (int m = 0; m < n; ++m) {
        std::uint64_t next = 0;
        for (int j = 0; j <= m; ++j) next += binomial(m, j) * b[static_cast<std::size_t>(j)];
        b.push_back(next);
    }
    return b[static_cast<std::size_t>(n)];
}

// All set partitions of {1..n}, in lexicographic restricted-growth-string
// order.  RGS a: a[0]=0, a[i] ≤ 1+max(a[0..i-1]); block j collects the
// positions with digit j.
inline std::vector<Partition> enumerate_partitions(int n) {
    if (n < 1 || n > 8) throw std::out_of_range("enumerate_partitions: n must be in [1, 8]");
    std::vector<Partition> out;
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    auto emit = [&] {
        int nblocks = 0;
        for (int d : a) nblocks = std::max(nblocks, d + 1);
        Partition p;
        p.n = n;
        p.blocks.assign(static_cast<std::size_t>(nblocks), SubsetIndex{n, {}});
        for (int i = 0; i < n; ++i) p.blocks[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])].members.push_back(i + 1);
        out.push_back(std::move(p));
    };
    std::function<void(int, int)> rec = [&](int i, int mx) {
        if (i == n) {
            emit();
            return;
        }
        for (int d = 0; d <= mx + 1; ++d) {
            a[static_cast<std::size_t>(i)] = d;
            rec(i + 1, std::max(mx, d));
        }
    };
    rec(1, 0);  // a[0] fixed to 0
    return out;
}

// a_π = (−1)^{|π|−1} (|π|−1)!
inline long long streitberg_coefficient(const Partition& pi) {
    int m = static_cast<int>(pi.blocks.size());
    long long f = 1;
    for (int i = 2; i < m; ++i) f *= i;
    return (m % 2 == 1) ? f : -f;
}

// Elementary symmetric polynomial p^n_k(r) by the O(nk) column recurrence
// p_k ← p_k + r_i·p_{k−1}; stable for nonnegative r and free of the 2^n
// subset blowup.
template <typename Derived>
typename Derived::Scalar elem_sym(int k, const Eigen::MatrixBase<Derived>& r) {
    using Scalar = typename Derived::Scalar;
    const int n = static_cast<int>(r.size());
    if (k < 0 || k > n) throw std::out_of_range("elem_sym: need 0 <= k <= n");
    std::vector<Scalar> p(static_cast<std::size_t>(k) + 1, Scalar(0));
    p[0] = Scalar(1);
    for (int i = 0; i < n; ++i) {
        for (int j = std::min(k, i + 1); j >= 1; --j) {
            p[static_cast<std::size_t>(j)] += r[i] * p[static_cast<std::size_t>(j) - 1];
        }
    }
    return p[static_cast<std::size_t>(k)];
}

// All of p^n_0 … p^n_m in one pass.
template <typename Derived>
std::vector<typename Derived::Scalar> elem_sym_all(int m, const Eigen::MatrixBase<Derived>& r) {
    using Scalar = typename Derived::Scalar;
    const int n = static_cast<int>(r.size());
    if (m < 0 || m > n) throw std::out_of_range("elem_sym_all: need 0 <= m <= n");
    std::vector<Scalar> p(static_cast<std::size_t>(m) + 1, Scalar(0));
    p[0] = Scalar(1);
    for (int i = 0; i < n; ++i) {
        for (int j = std::min(m, i + 1); j >= 1; --j) {
            p[static_cast<std::size_t>(j)] += r[i] * p[static_cast<std::size_t>(j) - 1];
        }
    }
    return p;
}

// Hⁿ_k(r) = p^n_n(r) + Σ_{j=0}^{k−1} (−1)^{k−j} C(n−j−1, n−k) p^n_j(r)
template <typename Derived>
typename Derived::Scalar h_poly(int k, int n, const Eigen::MatrixBase<Derived>& r) {
    using Scalar = typename Derived::Scalar;
    if (static_cast<int>(r.size()) != n) throw std::invalid_argument("h_poly: length(r) != n");
    if (k < 0 || k > n) throw std::out_of_range("h_poly: need 0 <= k <= n");
    auto p = elem_sym_all(n, r);
    Scalar h = p[static_cast<std::size_t>(n)];
    for (int j = 0; j < k; ++j) {
        Scalar c = Scalar(static_cast<double>(binomial(n - j - 1, n - k)));
        Scalar term = c * p[static_cast<std::size_t>(j)];
        h += ((k - j) % 2 == 0) ? term : -term;
    }
    return h;
}

// Eⁿ_k(s) = Hⁿ_k(e^{−s_1}, …, e^{−s_n}), s ≥ 0
template <typename Derived>
typename Derived::Scalar e_func(int k, int n, const Eigen::MatrixBase<Derived>& s) {
    if (static_cast<int>(s.size()) != n) throw std::invalid_argument("e_func: length(s) != n");
    if ((s.array() < 0).any()) throw std::domain_error("e_func: s must be nonnegative");
    return h_poly(k, n, s.array().exp().inverse().matrix().eval());
}

// t ∈ ∂ⁿ_{k−1}  ⟺  fewer than k strictly positive entries
template <typename Derived>
bool in_boundary(const Eigen::MatrixBase<Derived>& t, int k) {
    int positive = 0;
    for (int i = 0; i < t.size(); ++i) {
        if (t[i] > 0) ++positive;
    }
    return positive < k;
}

// All subsets of {1..n} of size j, lexicographic; shared by measures/kernels.
inline std::vector<SubsetIndex> subsets_of_size(int n, int j) {
    std::vector<SubsetIndex> out;
    if (j < 0 || j > n) return out;
    std::vector<int> idx(static_cast<std::size_t>(j));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == j) {
            out.push_back(SubsetIndex{n, idx});
            return;
        }
        for (int v = start; v <= n - (j - depth) + 1; ++v) {
            idx[static_cast<std::size_t>(depth)] = v;
            rec(v + 1, depth + 1);
        }
    };
    rec(1, 0);
    return out;
}

inline SubsetIndex complement(const SubsetIndex& f) {
    SubsetIndex c{f.n, {}};
    std::size_t pos = 0;
    for (int v = 1; v <= f.n; ++v) {
        if (pos < f.members.size() && f.members[pos] == v) {
            ++pos;
        } else {
            c.members.push_back(v);
        }
    }
    return c;
}

}  // namespace pdi
