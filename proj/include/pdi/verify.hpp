#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "pdi/kernels.hpp"
#include "pdi/stats.hpp"

// Independent numeric oracles for the identities and inequalities the library
// is built on.  Quadratic forms in here are literal double loops on purpose:
// this module must be able to contradict the optimized engines.

namespace pdi::verify {

struct ResidualReport {
    std::string name;
    double max_abs_residual = 0;
    double max_rel_residual = 0;
    int trials = 0;
    std::string worst_case;  // serialized payload of the worst trial
};

inline bool psd_check(const Eigen::MatrixXd& G, double tol = tol::psd_eigen) {
    if (!G.allFinite()) throw std::invalid_argument("psd_check: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    return lmin >= -tol * std::max(1.0, lmax);
}

// ‖K^𝕴_{δⁿ₂[y,z]}‖² computed directly: double sum of 𝕴 over δⁿ₂ atom pairs
// (k = 2, so the PDI sign is +1 and this is exactly the squared RKHS norm).
inline double delta2_norm2(const PDIKernelSpec& spec, const ProductPoint& y, const ProductPoint& z) {
    const DiscreteMeasure d = delta2(spec.sig, y, z);
    double s = 0;
    for (const auto& a : d.atoms) {
        for (const auto& b : d.atoms) {
            s += a.weight * b.weight * pdi_eval(spec, a.point, b.point);
        }
    }
    return s;
}

namespace detail {

// Build x_α from an index vector α ∈ {1,2,3}ⁿ over (x₁, x₂, x₃).
inline ProductPoint indexed_point(const std::vector<int>& alpha, const ProductPoint& x1,
                                  const ProductPoint& x2, const ProductPoint& x3) {
    ProductPoint p;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const ProductPoint& src = alpha[i] == 1 ? x1 : (alpha[i] == 2 ? x2 : x3);
        p.comps.push_back(src.comps[i]);
    }
    return p;
}

}  // namespace detail

// |𝕴(x₁,x₂) − RHS| with the appendix constants:
//   general:  Σ_{|F|=2}^{n} Σ_{σ⊎ς=F^c} c ‖K_{δ₂[σ+2ς+1⃗_F, σ+2ς+2⃗_F]}‖²
//             c = 1/16 (n=2); 1/24, 1/96 (n=3); 1/40, 1/120, 1/960 (n=4);
//             c⁵_{|σ|,|ς|} table (n=5)
//   complete: Σ_{|F|=2}^{n} b_{|F|} ‖K_{δ₂[3⃗_{F^c}+1⃗_F, 3⃗_{F^c}+2⃗_F]}‖²
//             b = 1/16; 1/24, 1/48; 1/40, 1/60, 1/240; 1/60, 1/120, 1/120, −1/240
enum class AppendixVariant { General, CompleteSymmetric };

inline double appendix_identity_residual(const PDIKernelSpec& spec, int n, const ProductPoint& x1,
                                         const ProductPoint& x2, const ProductPoint& x3,
                                         AppendixVariant variant) {
    if (spec.order != 2) throw std::invalid_argument("appendix_identity_residual: spec must have order 2");
    if (n < 2 || n > 5 || spec.sig.n != n) {
        throw std::invalid_argument("appendix_identity_residual: unsupported n");
    }
    double rhs = 0;
    if (variant == AppendixVariant::General) {
        // coefficient tables; n=5 depends on (|σ|,|ς|), the others on |F| only
        auto coeff = [&](int sizeF, int nsig, int nvar) -> double {
            switch (n) {
                case 2: return 1.0 / 16.0;
                case 3: return sizeF == 3 ? 1.0 / 24.0 : 1.0 / 96.0;
                case 4: return sizeF == 4 ? 1.0 / 40.0 : (sizeF == 3 ? 1.0 / 120.0 : 1.0 / 960.0);
                case 5: {
                    static const std::map<std::pair<int, int>, double> c5 = {
                        {{0, 0}, 1.0 / 60.0},  {{1, 0}, 1.0 / 240.0},  {{0, 1}, 1.0 / 240.0},
                        {{2, 0}, 1.0 / 360.0}, {{0, 2}, 1.0 / 360.0},  {{1, 1}, 1.0 / 720.0},
                        {{3, 0}, -1.0 / 640.0}, {{0, 3}, -1.0 / 640.0}, {{2, 1}, -1.0 / 5760.0},
                        {{1, 2}, -1.0 / 5760.0}};
                    return c5.at({nsig, nvar});
                }
            }
            return 0;
        };
        for (int j = 2; j <= n; ++j) {
            for (const auto& f : subsets_of_size(n, j)) {
                const SubsetIndex fc = complement(f);
                const int m = static_cast<int>(fc.members.size());
                for (int mask = 0; mask < (1 << m); ++mask) {
                    // σ = off-F indices assigned to x₁, ς = the rest (x₂)
                    std::vector<int> alpha1(static_cast<std::size_t>(n), 0);
                    std::vector<int> alpha2(static_cast<std::size_t>(n), 0);
                    for (int v : f.members) {
                        alpha1[static_cast<std::size_t>(v - 1)] = 1;
                        alpha2[static_cast<std::size_t>(v - 1)] = 2;
                    }
                    int nsig = 0;
                    for (int i = 0; i < m; ++i) {
                        const int v = fc.members[static_cast<std::size_t>(i)];
                        const int idx = (mask >> i) & 1 ? 1 : 2;
                        if (idx == 1) ++nsig;
                        alpha1[static_cast<std::size_t>(v - 1)] = idx;
                        alpha2[static_cast<std::size_t>(v - 1)] = idx;
                    }
                    rhs += coeff(j, nsig, m - nsig) *
                           delta2_norm2(spec, detail::indexed_point(alpha1, x1, x2, x3),
                                        detail::indexed_point(alpha2, x1, x2, x3));
                }
            }
        }
    } else {
        auto bcoeff = [&](int sizeF) -> double {
            switch (n) {
                case 2: return 1.0 / 16.0;
                case 3: return sizeF == 3 ? 1.0 / 24.0 : 1.0 / 48.0;
                case 4: return sizeF == 4 ? 1.0 / 40.0 : (sizeF == 3 ? 1.0 / 60.0 : 1.0 / 240.0);
                case 5:
                    switch (sizeF) {
                        case 5: return 1.0 / 60.0;
                        case 4: return 1.0 / 120.0;
                        case 3: return 1.0 / 120.0;
                        case 2: return -1.0 / 240.0;
                    }
            }
            return 0;
        };
        for (int j = 2; j <= n; ++j) {
            for (const auto& f : subsets_of_size(n, j)) {
                std::vector<int> alpha1(static_cast<std::size_t>(n), 3);
                std::vector<int> alpha2(static_cast<std::size_t>(n), 3);
                for (int v : f.members) {
                    alpha1[static_cast<std::size_t>(v - 1)] = 1;
                    alpha2[static_cast<std::size_t>(v - 1)] = 2;
                }
                rhs += bcoeff(j) * delta2_norm2(spec, detail::indexed_point(alpha1, x1, x2, x3),
                                                detail::indexed_point(alpha2, x1, x2, x3));
            }
        }
    }
    return std::abs(pdi_eval(spec, x1, x2) - rhs);
}

namespace detail {

inline ProductPoint random_point(const SpaceSignature& sig, CounterRng& rng, double lo = -1, double hi = 1) {
    ProductPoint p;
    for (int i = 0; i < sig.n; ++i) {
        Eigen::VectorXd v(sig.dims[static_cast<std::size_t>(i)]);
        for (int d = 0; d < v.size(); ++d) v[d] = rng.uniform(lo, hi);
        p.comps.push_back(std::move(v));
    }
    return p;
}

inline void track(ResidualReport& rep, double violation, double scale, const std::string& payload) {
    ++rep.trials;
    if (violation > rep.max_abs_residual) {
        rep.max_abs_residual = violation;
        rep.worst_case = payload;
    }
    rep.max_rel_residual = std::max(rep.max_rel_residual, violation / std::max(1.0, scale));
}

}  // namespace detail

// The inequality battery: each report carries the maximal observed violation
// (0 means the inequality held everywhere it was sampled).
inline std::vector<ResidualReport> inequality_suite(std::uint64_t seed, int trials) {
    if (trials < 1) throw std::invalid_argument("inequality_suite: trials >= 1");
    std::vector<ResidualReport> out;

    // 1 ≤ (1−e^{−s})(1+s)/s ≤ 2 on a log grid
    {
        ResidualReport rep{"bern1ineq", 0, 0, 0, ""};
        for (int i = 0; i <= 2200; ++i) {
            const double s = std::pow(10.0, -8.0 + 11.0 * i / 2200.0);
            const double v = -std::expm1(-s) * (1.0 + s) / s;
            detail::track(rep, std::max(1.0 - v, v - 2.0), 1.0, "s=" + std::to_string(s));
        }
        out.push_back(rep);
    }
    // 0 ≤ C(n,k)⁻¹ p^n_k(1⃗−a) ≤ (−1)^k Hⁿ_k(a) ≤ p^n_k(1⃗−a), a ∈ [0,1]^n,
    // stated for n ≥ 2 and 0 < k ≤ n
    {
        ResidualReport rep{"ineqorderk2eq1", 0, 0, 0, ""};
        CounterRng r(seed, 1);
        for (int t = 0; t < trials; ++t) {
            for (int n = 2; n <= 6; ++n) {
                for (int k = 1; k <= n; ++k) {
                    Eigen::VectorXd a(n);
                    for (int i = 0; i < n; ++i) a[i] = r.uniform();
                    const double pk = elem_sym(k, (1.0 - a.array()).matrix().eval());
                    const double h = ((k % 2 == 0) ? 1.0 : -1.0) * h_poly(k, n, a);
                    const double lo = pk / static_cast<double>(binomial(n, k));
                    const double viol = std::max({-lo, lo - h, h - pk});
                    detail::track(rep, viol, std::abs(pk), "n=" + std::to_string(n) + " k=" + std::to_string(k));
                }
            }
        }
        out.push_back(rep);
    }
    // g(t) ≤ g(1⃗)·Π(1+t_i) and 2ⁿ-subadditivity for order-n library g
    {
        ResidualReport cons{"consineqexp2", 0, 0, 0, ""};
        ResidualReport conv{"convexexp", 0, 0, 0, ""};
        CounterRng r(seed, 2);
        for (int t = 0; t < trials; ++t) {
            for (int n = 2; n <= 4; ++n) {
                BernsteinSpecK g = BernsteinSpecK::order_n(
                    n, {{Eigen::VectorXd::Constant(n, 0.7), 0.9}, {Eigen::VectorXd::Constant(n, 2.0), 0.4}});
                Eigen::VectorXd t1(n), t2(n);
                for (int i = 0; i < n; ++i) {
                    t1[i] = r.uniform(0.0, 3.0);
                    t2[i] = r.uniform(0.0, 3.0);
                }
                const double g1 = bernstein_eval_g(g, Eigen::VectorXd::Ones(n));
                double bound = g1;
                for (int i = 0; i < n; ++i) bound *= 1.0 + t1[i];
                const double gt = bernstein_eval_g(g, t1);
                detail::track(cons, gt - bound, std::abs(bound), "n=" + std::to_string(n));
                // g(t₁+t₂) ≤ Σ_{α∈{1,2}ⁿ} g(t_α)
                double rhs = 0;
                for (int mask = 0; mask < (1 << n); ++mask) {
                    Eigen::VectorXd ta(n);
                    for (int i = 0; i < n; ++i) ta[i] = ((mask >> i) & 1) ? t2[i] : t1[i];
                    rhs += bernstein_eval_g(g, ta);
                }
                const double lhs = bernstein_eval_g(g, (t1 + t2).eval());
                detail::track(conv, lhs - rhs, std::abs(rhs), "n=" + std::to_string(n));
            }
        }
        out.push_back(cons);
        out.push_back(conv);
    }
    // growth bounds: C(n,k)⁻¹ Σ_{|F|=k} g(t_F) ≤ g(t) ≤ Σ_{|F|=k} g(t_F), k < n
    {
        ResidualReport rep{"growthpdiknvar", 0, 0, 0, ""};
        CounterRng r(seed, 3);
        for (int t = 0; t < std::max(trials, 200); ++t) {
            for (int n = 3; n <= 4; ++n) {
                for (int k = 1; k < n; ++k) {
                    BernsteinSpecK g = BernsteinSpecK::order_k(
                        n, k, {{Eigen::VectorXd::Ones(n), 1.0}, {Eigen::VectorXd::Constant(n, 0.5), 0.5}});
                    Eigen::VectorXd tv(n);
                    for (int i = 0; i < n; ++i) tv[i] = r.uniform(0.0, 4.0);
                    double sumF = 0;
                    for (const auto& f : subsets_of_size(n, k)) {
                        Eigen::VectorXd tf = Eigen::VectorXd::Zero(n);
                        for (int v : f.members) tf[v - 1] = tv[v - 1];
                        sumF += bernstein_eval_g(g, tf);
                    }
                    const double gt = bernstein_eval_g(g, tv);
                    const double viol =
                        std::max(sumF / static_cast<double>(binomial(n, k)) - gt, gt - sumF);
                    detail::track(rep, viol, std::abs(sumF), "n=" + std::to_string(n) + " k=" + std::to_string(k));
                }
            }
        }
        out.push_back(rep);
    }
    // complete-symmetry lower bounds: (16/48) (n=3) and (16/240) (n=4) times
    // Σ_{|F|=2} 𝕴(x₁_F+3_{F^c}, x₂_F+3_{F^c}) ≤ 𝕴(x₁,x₂), order-2 kernels
    {
        ResidualReport rep{"complnsym_k2", 0, 0, 0, ""};
        CounterRng r(seed, 4);
        for (int t = 0; t < trials; ++t) {
            for (int n = 3; n <= 4; ++n) {
                const SpaceSignature sig = scalar_signature(n);
                PDIKernelSpec spec = PDIKernelSpec::bernstein(
                    sig,
                    BernsteinSpecK::order_k(n, 2, {{Eigen::VectorXd::Ones(n), 1.0},
                                                   {Eigen::VectorXd::Constant(n, 0.5), 0.5}}),
                    default_gammas(n), "complnsym-g");
                const ProductPoint x1 = detail::random_point(sig, r);
                const ProductPoint x2 = detail::random_point(sig, r);
                const ProductPoint x3 = detail::random_point(sig, r);
                double sumF = 0;
                for (const auto& f : subsets_of_size(n, 2)) {
                    std::vector<int> a1(static_cast<std::size_t>(n), 3), a2(static_cast<std::size_t>(n), 3);
                    for (int v : f.members) {
                        a1[static_cast<std::size_t>(v - 1)] = 1;
                        a2[static_cast<std::size_t>(v - 1)] = 2;
                    }
                    sumF += pdi_eval(spec, detail::indexed_point(a1, x1, x2, x3),
                                     detail::indexed_point(a2, x1, x2, x3));
                }
                const double factor = n == 3 ? 16.0 / 48.0 : 16.0 / 240.0;
                const double lhs = factor * sumF;
                const double rhs = pdi_eval(spec, x1, x2);
                detail::track(rep, lhs - rhs, std::abs(rhs), "n=" + std::to_string(n));
            }
        }
        out.push_back(rep);
    }
    // E_ℓ is nonnegative, increasing, and convex for ℓ > 1 on a sampled grid
    {
        ResidualReport rep{"E_ell_shape", 0, 0, 0, ""};
        for (int ell = 1; ell <= 4; ++ell) {
            double prev = 0, prev_diff = -1;
            for (int i = 0; i <= 4000; ++i) {
                const double s = 20.0 * i / 4000.0;
                const double v = e_ell(ell, s);
                detail::track(rep, -v, 1.0, "ell=" + std::to_string(ell));
                if (i > 0) {
                    const double diff = v - prev;
                    detail::track(rep, -diff - 1e-15, 1.0, "ell=" + std::to_string(ell) + " monot");
                    if (ell > 1 && prev_diff >= 0) {
                        detail::track(rep, prev_diff - diff - 1e-12, 1.0,
                                      "ell=" + std::to_string(ell) + " convex");
                    }
                    prev_diff = diff;
                }
                prev = v;
            }
        }
        out.push_back(rep);
    }
    return out;
}

// |naive V-statistic − KME double sum|, both sides re-derived with literal
// loops (x₀-independence of the right-hand side is the embedding statement).
inline double kme_equivalence_residual(const PDIKernelSpec& spec, int k, const DiscreteMeasure& mu,
                                       const ProductPoint& x0) {
    if (!in_Mk(mu, k)) throw std::invalid_argument("kme_equivalence_residual: mu not in M_k");
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    double lhs = 0;
    for (const auto& a : mu.atoms) {
        for (const auto& b : mu.atoms) {
            lhs += sign * a.weight * b.weight * pdi_eval(spec, a.point, b.point);
        }
    }
    double rhs = 0;
    for (const auto& a : mu.atoms) {
        for (const auto& b : mu.atoms) {
            rhs += a.weight * b.weight * induced_pd_eval(spec, k, x0, a.point, b.point);
        }
    }
    return std::abs(lhs - rhs);
}

// Corollary (classkroenne) sampling: case (ii) (two strictly CND factors,
// ℓ = 2 = n) and case (iii) (ℓ = 2 < n with one SPD factor) must give
// strictly positive statistics on nonzero M₂ measures; a constant (non-strict)
// factor must admit a zero witness.
struct KroneckerSignResult {
    ResidualReport report;
    double min_statistic_case2 = 0;
    double min_statistic_case3 = 0;
    double zero_witness_statistic = 0;
    bool pass = false;
};

inline KroneckerSignResult kronecker_sign_check(std::uint64_t seed, int trials) {
    KroneckerSignResult res;
    res.report.name = "kronecker_sign";
    res.min_statistic_case2 = std::numeric_limits<double>::infinity();
    res.min_statistic_case3 = std::numeric_limits<double>::infinity();

    auto quad = [](const PDIKernelSpec& spec, const DiscreteMeasure& mu, int k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        double s = 0;
        for (const auto& a : mu.atoms) {
            for (const auto& b : mu.atoms) {
                s += sign * a.weight * b.weight * pdi_eval(spec, a.point, b.point);
            }
        }
        return s;
    };

    // case (ii): n = m = 1, 𝕴 = γ_X ⊗ γ_Y with strictly CND euclidean factors
    const SpaceSignature sig2 = scalar_signature(2);
    const PDIKernelSpec case2 = dcov_kernel(sig2);
    // case (iii): ℓ = 2 < n = 3, |F²| = 1:
    //   factor 1 = √(γ₁+γ₂) on block {1,2}, the Euclidean distance of the
    //   concatenated pair — strictly CND on the whole block ((−1)^{a₁+1}·𝕴₁
    //   SCND with a₁ = 1; a plain sum γ₁+γ₂ would be degenerate against
    //   measures whose coordinate marginals vanish)
    //   factor 2 = −e^{−γ₃} on block {3}  ((−1)^{a₂}·𝕴₂ SPD, a₂ = 1)
    const PDIKernelSpec case3 = PDIKernelSpec::kronecker(
        {PDIKernelSpec::sum_form(scalar_signature(2), CMFunctionSpec::power(0.5, 1),
                                 {ComponentCND::squared_euclidean(), ComponentCND::squared_euclidean()},
                                 "block-dist"),
         PDIKernelSpec::sum_form(scalar_signature(1), CMFunctionSpec::exponential(1.0, 1),
                                 {ComponentCND::squared_euclidean()}, "neg-gauss")},
        "classkroenne-iii");
    // non-strict witness: a constant Gram kernel on one side kills the form
    Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(2, 2, 1.5);
    std::vector<Eigen::VectorXd> reg{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)};
    const PDIKernelSpec degenerate = PDIKernelSpec::kronecker(
        {PDIKernelSpec::sum_form(scalar_signature(1), CMFunctionSpec::power(1.0, 1),
                                 {ComponentCND::from_gram(flat, reg)}, "flat"),
         PDIKernelSpec::sum_form(scalar_signature(1), CMFunctionSpec::power(1.0, 1),
                                 {ComponentCND::euclidean_power(1.0)}, "dcov-leaf")},
        "degenerate");

    res.pass = true;
    for (int t = 0; t < trials; ++t) {
        const DiscreteMeasure mu2 = random_Mk(sig2, 2, 3, seed + static_cast<std::uint64_t>(t));
        const double s2 = quad(case2, mu2, 2);
        res.min_statistic_case2 = std::min(res.min_statistic_case2, s2);
        if (s2 <= 0) res.pass = false;

        const DiscreteMeasure mu3 =
            random_Mk(scalar_signature(3), 2, 2, seed + 0x9000 + static_cast<std::uint64_t>(t));
        const double s3 = quad(case3, mu3, 2);
        res.min_statistic_case3 = std::min(res.min_statistic_case3, s3);
        if (s3 <= 0) res.pass = false;
        detail::track(res.report, std::max(-s2, -s3), 1.0, "trial " + std::to_string(t));
    }
    // witness: μ = (δ₀ − δ₁) × (δ₀ − δ₁) on registered points; the constant
    // factor integrates to zero against the centered measure
    {
        DiscreteMeasure mu{scalar_signature(2), {}};
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                mu.atoms.push_back({ProductPoint{{Eigen::VectorXd::Constant(1, double(i)),
                                                  Eigen::VectorXd::Constant(1, double(j))}},
                                    ((i + j) % 2 == 0) ? 1.0 : -1.0});
            }
        }
        res.zero_witness_statistic = quad(degenerate, normalize(mu), 2);
        if (std::abs(res.zero_witness_statistic) > 1e-12) res.pass = false;
    }
    return res;
}

}  // namespace pdi::verify
