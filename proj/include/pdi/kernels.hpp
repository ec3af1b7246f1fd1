#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdi/combinat.hpp"
#include "pdi/measures.hpp"

namespace pdi {

// ---------------------------------------------------------------------------
// Component CND kernels γ_i on one factor space
// ---------------------------------------------------------------------------
struct ComponentCND {
    enum class Kind { EuclideanPower, SquaredEuclidean, Gram, Shifted };
    Kind kind = Kind::EuclideanPower;
    double beta = 1.0;                           // euclidean_power: ‖x−y‖^β, β ∈ (0,2]
    Eigen::MatrixXd gram_values;                 // gram variant
    std::vector<Eigen::VectorXd> registry;       // gram variant point registry
    std::shared_ptr<ComponentCND> base;          // shifted variant
    double shift_c = 0;                          // shifted: adds c off the diagonal? no — see eval

    static ComponentCND euclidean_power(double beta) {
        if (!(beta > 0 && beta <= 2)) throw std::invalid_argument("euclidean_power: beta must be in (0,2]");
        ComponentCND g;
        g.kind = Kind::EuclideanPower;
        g.beta = beta;
        return g;
    }
    static ComponentCND squared_euclidean() {
        ComponentCND g;
        g.kind = Kind::SquaredEuclidean;
        return g;
    }
    static ComponentCND from_gram(Eigen::MatrixXd values, std::vector<Eigen::VectorXd> points) {
        if (values.rows() != values.cols() ||
            values.rows() != static_cast<Eigen::Index>(points.size())) {
            throw std::invalid_argument("from_gram: matrix/registry size mismatch");
        }
        double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
        if ((values - values.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw std::invalid_argument("from_gram: matrix is not symmetric");
        }
        ComponentCND g;
        g.kind = Kind::Gram;
        g.gram_values = std::move(values);
        g.registry = std::move(points);
        return g;
    }
    static ComponentCND shifted(ComponentCND inner, double c) {
        if (c < 0) throw std::invalid_argument("shifted: c must be >= 0");
        ComponentCND g;
        g.kind = Kind::Shifted;
        g.base = std::make_shared<ComponentCND>(std::move(inner));
        g.shift_c = c;
        return g;
    }

    bool zero_diagonal() const {
        switch (kind) {
            case Kind::EuclideanPower:
            case Kind::SquaredEuclidean: return true;
            case Kind::Gram: return gram_values.size() == 0 || gram_values.diagonal().cwiseAbs().maxCoeff() == 0;
            case Kind::Shifted: return shift_c == 0 && base->zero_diagonal();
        }
        return false;
    }
};

inline double cnd_eval(const ComponentCND& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) throw std::invalid_argument("cnd_eval: dimension mismatch");
    switch (g.kind) {
        case ComponentCND::Kind::EuclideanPower: return std::pow((x - y).norm(), g.beta);
        case ComponentCND::Kind::SquaredEuclidean: return (x - y).squaredNorm();
        case ComponentCND::Kind::Gram: {
            auto find = [&](const Eigen::VectorXd& p) -> Eigen::Index {
                for (std::size_t i = 0; i < g.registry.size(); ++i) {
                    if (g.registry[i].size() == p.size() && (g.registry[i].array() == p.array()).all()) {
                        return static_cast<Eigen::Index>(i);
                    }
                }
                throw std::invalid_argument("cnd_eval: point not in gram registry");
            };
            return g.gram_values(find(x), find(y));
        }
        case ComponentCND::Kind::Shifted: {
            // adds a constant diagonal offset c: γ(x,y) = base(x,y) + c·1[x==y] stays
            // CND only if added uniformly, so we add c everywhere (γ + c is CND).
            return cnd_eval(*g.base, x, y) + g.shift_c;
        }
    }
    throw std::logic_error("cnd_eval: unreachable");
}

// K^γ(x,y) = γ(x,w) + γ(w,y) − γ(x,y) − γ(w,w)   (PD iff γ CND)
inline double kgamma_eval(const ComponentCND& g, const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y) {
    return cnd_eval(g, x, w) + cnd_eval(g, w, y) - cnd_eval(g, x, y) - cnd_eval(g, w, w);
}

// ---------------------------------------------------------------------------
// Completely monotone functions of order ℓ (sum-form building block)
// ---------------------------------------------------------------------------

// ω_ℓ(s) = Σ_{j=0}^{ℓ−1} (−s)^j / j!   (degree-(ℓ−1) truncation of e^{−s})
inline double omega_ell(int ell, double s) {
    double term = 1, sum = 0;
    for (int j = 0; j < ell; ++j) {
        sum += term;
        term *= -s / static_cast<double>(j + 1);
    }
    return sum;
}

// E_ℓ(s) = (−1)^ℓ (e^{−s} − ω_ℓ(s));  E₁(s) = 1 − e^{−s}
inline double e_ell(int ell, double s) {
    const double sign = (ell % 2 == 0) ? 1.0 : -1.0;
    if (s < 0.5) {
        // sum the tail of the alternating series directly to dodge cancellation
        double term = 1;
        for (int j = 1; j <= ell; ++j) term *= -s / static_cast<double>(j);
        double sum = 0, t = term;
        for (int j = ell; j < ell + 40; ++j) {
            sum += t;
            t *= -s / static_cast<double>(j + 1);
            if (std::abs(t) < 1e-18 * (std::abs(sum) + 1e-300)) break;
        }
        return sign * sum;
    }
    return sign * (std::exp(-s) - omega_ell(ell, s));
}

struct CMFunctionSpec {
    enum class Kind { Power, LogPower, Exponential, ShiftedPower, Mixture };
    Kind kind = Kind::Power;
    int ell = 1;
    double a = 1.0;                               // power / shifted_power exponent
    double r = 1.0;                               // exponential rate
    double c = 1.0;                               // shifted_power offset
    double a_ell = 0.0;                           // mixture top coefficient ((−1)^ℓ a_ℓ ≥ 0)
    std::vector<std::pair<double, double>> sigma_atoms;  // mixture (r > 0, weight ≥ 0)

    static CMFunctionSpec power(double a, int ell) {
        if (!(a > ell - 1 && a <= ell)) throw std::invalid_argument("cm power: need ell-1 < a <= ell");
        CMFunctionSpec p;
        p.kind = Kind::Power;
        p.a = a;
        p.ell = ell;
        return p;
    }
    static CMFunctionSpec log_power(int ell) {
        CMFunctionSpec p;
        p.kind = Kind::LogPower;
        p.ell = ell;
        return p;
    }
    static CMFunctionSpec exponential(double r, int ell = 1) {
        if (!(r > 0)) throw std::invalid_argument("cm exponential: need r > 0");
        CMFunctionSpec p;
        p.kind = Kind::Exponential;
        p.r = r;
        p.ell = ell;
        return p;
    }
    static CMFunctionSpec shifted_power(double c, double a, int ell) {
        if (!(c > 0)) throw std::invalid_argument("cm shifted_power: need c > 0");
        if (!(a > ell - 1 && a <= ell)) throw std::invalid_argument("cm shifted_power: need ell-1 < a <= ell");
        CMFunctionSpec p;
        p.kind = Kind::ShiftedPower;
        p.c = c;
        p.a = a;
        p.ell = ell;
        return p;
    }
    static CMFunctionSpec mixture(double a_ell, std::vector<std::pair<double, double>> atoms, int ell) {
        const double sign = (ell % 2 == 0) ? 1.0 : -1.0;
        if (sign * a_ell < 0) throw std::invalid_argument("cm mixture: need (-1)^ell a_ell >= 0");
        for (auto& [r, w] : atoms) {
            if (!(r > 0) || w < 0) throw std::invalid_argument("cm mixture: atoms need r > 0, w >= 0");
        }
        CMFunctionSpec p;
        p.kind = Kind::Mixture;
        p.a_ell = a_ell;
        p.sigma_atoms = std::move(atoms);
        p.ell = ell;
        return p;
    }

    // Polynomial ψ is the non-strict (SPDI-failing) case of Corollary
    // (sum-form SPDI equivalence) when k < n.
    bool is_polynomial() const { return kind == Kind::Mixture && sigma_atoms.empty(); }
};

inline double cm_eval_psi(const CMFunctionSpec& psi, double t) {
    if (t < 0) throw std::domain_error("cm_eval_psi: t must be >= 0");
    const double sign = (psi.ell % 2 == 0) ? 1.0 : -1.0;
    switch (psi.kind) {
        case CMFunctionSpec::Kind::Power: return sign * std::pow(t, psi.a);
        case CMFunctionSpec::Kind::LogPower:
            return (t == 0) ? 0.0 : sign * std::pow(t, psi.ell - 1) * std::log(t);
        case CMFunctionSpec::Kind::Exponential: return std::exp(-psi.r * t);
        case CMFunctionSpec::Kind::ShiftedPower: return sign * std::pow(psi.c + t, psi.a);
        case CMFunctionSpec::Kind::Mixture: {
            double v = psi.a_ell * std::pow(t, psi.ell);
            for (const auto& [r, w] : psi.sigma_atoms) {
                // (e^{−rt} − ω_ℓ(rt)) (1+r)/r^ℓ = (−1)^ℓ E_ℓ(rt) (1+r)/r^ℓ
                v += w * sign * e_ell(psi.ell, r * t) * (1.0 + r) / std::pow(r, psi.ell);
            }
            return v;
        }
    }
    throw std::logic_error("cm_eval_psi: unreachable");
}

// ---------------------------------------------------------------------------
// Bernstein functions of order k in n variables
// ---------------------------------------------------------------------------
struct BernsteinSpecK {
    struct ProductAtom {
        Eigen::VectorXd r;  // k = n: anywhere in [0,∞)^n; k < n: > k positive entries
        double w = 0;       // ≥ 0
    };
    int n = 0;
    int k = 0;
    std::vector<ProductAtom> atoms;
    // k < n only: ψ^F blocks, evaluated as (−1)^k ψ^F(Σ_{i∈F} t_i)
    std::vector<std::pair<SubsetIndex, CMFunctionSpec>> face_terms;

    static BernsteinSpecK order_n(int n, std::vector<ProductAtom> atoms) {
        BernsteinSpecK g;
        g.n = n;
        g.k = n;
        for (const auto& a : atoms) {
            if (a.r.size() != n || a.w < 0 || (a.r.array() < 0).any()) {
                throw std::invalid_argument("BernsteinSpecK: bad order-n atom");
            }
        }
        g.atoms = std::move(atoms);
        return g;
    }
    static BernsteinSpecK order_k(int n, int k, std::vector<ProductAtom> atoms,
                                  std::vector<std::pair<SubsetIndex, CMFunctionSpec>> faces = {}) {
        if (k >= n || k < 0) throw std::invalid_argument("BernsteinSpecK::order_k: need 0 <= k < n");
        BernsteinSpecK g;
        g.n = n;
        g.k = k;
        for (const auto& a : atoms) {
            if (a.r.size() != n || a.w < 0) throw std::invalid_argument("BernsteinSpecK: bad atom");
            if (in_boundary(a.r, k + 1)) {
                throw std::invalid_argument("BernsteinSpecK: order-k atom needs > k positive entries");
            }
        }
        g.atoms = std::move(atoms);
        g.face_terms = std::move(faces);
        return g;
    }
};

// g(t).  k = n: Σ_a w Π_i (1−e^{−r_i t_i})(1+r_i)/r_i with r_i = 0 ↦ t_i.
// k < n: Σ_{|F|=k} ψ^F(t_F) + Σ_a w (−1)^k Eⁿ_k(r⊙t) p^n_k(r+1⃗)/p^n_k(r).
inline double bernstein_eval_g(const BernsteinSpecK& g, const Eigen::VectorXd& t) {
    if (t.size() != g.n) throw std::invalid_argument("bernstein_eval_g: bad t length");
    if ((t.array() < 0).any()) throw std::domain_error("bernstein_eval_g: t must be nonnegative");
    const double sign_k = (g.k % 2 == 0) ? 1.0 : -1.0;
    double v = 0;
    if (g.k == g.n) {
        for (const auto& atom : g.atoms) {
            double prod = atom.w;
            for (int i = 0; i < g.n && prod != 0; ++i) {
                const double r = atom.r[i], ti = t[i];
                if (r == 0) {
                    prod *= ti;  // limit of (1−e^{−rt})(1+r)/r as r → 0
                } else {
                    prod *= -std::expm1(-r * ti) * (1.0 + r) / r;
                }
            }
            v += prod;
        }
        return v;
    }
    for (const auto& [f, psi] : g.face_terms) {
        double s = 0;
        for (int m : f.members) s += t[m - 1];
        v += sign_k * cm_eval_psi(psi, s);
    }
    for (const auto& atom : g.atoms) {
        const Eigen::VectorXd rt = atom.r.cwiseProduct(t);
        const double pk_r = elem_sym(g.k, atom.r);
        const double pk_r1 = elem_sym(g.k, (atom.r.array() + 1.0).matrix().eval());
        v += atom.w * sign_k * e_func(g.k, g.n, rt) * pk_r1 / pk_r;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Assembled PDI_k kernels 𝕴 on 𝕏_n
// ---------------------------------------------------------------------------
struct PDIKernelSpec {
    enum class Kind { Bernstein, SumForm, Kronecker };
    Kind kind = Kind::SumForm;
    int order = 1;                       // the k of PDI_k
    SpaceSignature sig;
    std::string name;                    // for reports
    bool spdi = false;                   // strictness per the radial/sum SPDI theorems

    BernsteinSpecK g;                    // Bernstein
    CMFunctionSpec psi;                  // SumForm
    std::vector<ComponentCND> gammas;    // Bernstein / SumForm: one γ per factor
    std::vector<PDIKernelSpec> factors;  // Kronecker: consecutive block groups

    static PDIKernelSpec bernstein(SpaceSignature sig, BernsteinSpecK gspec,
                                   std::vector<ComponentCND> gammas, std::string name = "bernstein") {
        if (gspec.n != sig.n || static_cast<int>(gammas.size()) != sig.n) {
            throw std::invalid_argument("PDIKernelSpec::bernstein: arity mismatch");
        }
        PDIKernelSpec s;
        s.kind = Kind::Bernstein;
        s.order = gspec.k;
        s.sig = std::move(sig);
        s.g = std::move(gspec);
        s.gammas = std::move(gammas);
        s.name = std::move(name);
        s.spdi = !s.g.atoms.empty();  // η((0,∞)ⁿ) > 0 ⟹ SPDI_k for n > k
        return s;
    }
    static PDIKernelSpec sum_form(SpaceSignature sig, CMFunctionSpec psi,
                                  std::vector<ComponentCND> gammas, std::string name = "sum_form") {
        if (static_cast<int>(gammas.size()) != sig.n) {
            throw std::invalid_argument("PDIKernelSpec::sum_form: arity mismatch");
        }
        PDIKernelSpec s;
        s.kind = Kind::SumForm;
        s.order = psi.ell;
        s.sig = std::move(sig);
        s.psi = std::move(psi);
        s.gammas = std::move(gammas);
        s.name = std::move(name);
        s.spdi = !s.psi.is_polynomial();
        return s;
    }
    static PDIKernelSpec kronecker(std::vector<PDIKernelSpec> factors, std::string name = "kronecker") {
        if (factors.empty()) throw std::invalid_argument("PDIKernelSpec::kronecker: need factors");
        PDIKernelSpec s;
        s.kind = Kind::Kronecker;
        s.order = 0;
        s.sig.n = 0;
        for (const auto& f : factors) {
            s.order += f.order;  // Theorem (Kroengeral)(ii) order bookkeeping
            s.sig.n += f.sig.n;
            s.sig.dims.insert(s.sig.dims.end(), f.sig.dims.begin(), f.sig.dims.end());
        }
        s.factors = std::move(factors);
        s.name = std::move(name);
        return s;
    }
};

inline double pdi_eval(const PDIKernelSpec& spec, const ProductPoint& x1, const ProductPoint& x2) {
    switch (spec.kind) {
        case PDIKernelSpec::Kind::Bernstein: {
            Eigen::VectorXd t(spec.sig.n);
            for (int i = 0; i < spec.sig.n; ++i) {
                t[i] = cnd_eval(spec.gammas[static_cast<std::size_t>(i)],
                                x1.comps[static_cast<std::size_t>(i)], x2.comps[static_cast<std::size_t>(i)]);
            }
            return bernstein_eval_g(spec.g, t);
        }
        case PDIKernelSpec::Kind::SumForm: {
            double s = 0;
            for (int i = 0; i < spec.sig.n; ++i) {
                s += cnd_eval(spec.gammas[static_cast<std::size_t>(i)],
                              x1.comps[static_cast<std::size_t>(i)], x2.comps[static_cast<std::size_t>(i)]);
            }
            const double sign = (spec.order % 2 == 0) ? 1.0 : -1.0;
            return sign * cm_eval_psi(spec.psi, s);
        }
        case PDIKernelSpec::Kind::Kronecker: {
            double v = 1;
            int off = 0;
            for (const auto& f : spec.factors) {
                ProductPoint a, b;
                for (int i = 0; i < f.sig.n; ++i) {
                    a.comps.push_back(x1.comps[static_cast<std::size_t>(off + i)]);
                    b.comps.push_back(x2.comps[static_cast<std::size_t>(off + i)]);
                }
                v *= pdi_eval(f, a, b);
                off += f.sig.n;
            }
            return v;
        }
    }
    throw std::logic_error("pdi_eval: unreachable");
}

// K^𝕴(x₁,x₂) = ΣΣ a·b·(−1)^k·𝕴(u,v) over atoms of μⁿ_k[x₁,x₀] and μⁿ_k[x₂,x₀]
inline double induced_pd_eval(const PDIKernelSpec& spec, int k, const ProductPoint& x0,
                              const ProductPoint& x1, const ProductPoint& x2) {
    const DiscreteMeasure m1 = mu_k(spec.sig, x1, x0, k);
    const DiscreteMeasure m2 = mu_k(spec.sig, x2, x0, k);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    double v = 0;
    for (const auto& a : m1.atoms) {
        for (const auto& b : m2.atoms) {
            v += a.weight * b.weight * sign * pdi_eval(spec, a.point, b.point);
        }
    }
    return v;
}

// Symmetric Gram matrix of a kernel closure over a point list; asymmetry
// beyond the bound is an internal error, below it we average it away.
template <typename F>
Eigen::MatrixXd gram(F&& kernel, const std::vector<ProductPoint>& points) {
    if (points.empty()) throw std::invalid_argument("gram: need at least one point");
    const Eigen::Index N = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd G(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) {
            G(i, j) = kernel(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
        }
    }
    const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
    if ((G - G.transpose()).cwiseAbs().maxCoeff() > tol::gram_asym * scale) {
        throw std::runtime_error("gram: kernel asymmetry beyond bound");
    }
    return 0.5 * (G + G.transpose());
}

}  // namespace pdi
