#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "pdi/combinat.hpp"
#include "pdi/common.hpp"

namespace pdi {

// 𝕏_n = Π X_i with X_i = R^{dims[i]}
struct SpaceSignature {
    int n = 0;
    std::vector<int> dims;

    bool operator==(const SpaceSignature& o) const { return n == o.n && dims == o.dims; }
};

// One point of the n-fold product: n component vectors.
struct ProductPoint {
    std::vector<Eigen::VectorXd> comps;

    bool matches(const SpaceSignature& sig) const {
        if (static_cast<int>(comps.size()) != sig.n) return false;
        for (int i = 0; i < sig.n; ++i) {
            if (comps[static_cast<std::size_t>(i)].size() != sig.dims[static_cast<std::size_t>(i)]) return false;
        }
        return true;
    }
};

inline int compare_points(const ProductPoint& a, const ProductPoint& b) {
    for (std::size_t i = 0; i < a.comps.size(); ++i) {
        const auto& u = a.comps[i];
        const auto& v = b.comps[i];
        for (int j = 0; j < u.size(); ++j) {
            if (u[j] < v[j]) return -1;
            if (u[j] > v[j]) return 1;
        }
    }
    return 0;
}

inline double point_sup_dist(const ProductPoint& a, const ProductPoint& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.comps.size(); ++i) {
        d = std::max(d, (a.comps[i] - b.comps[i]).cwiseAbs().maxCoeff());
    }
    return d;
}

struct Atom {
    ProductPoint point;
    double weight = 0;
};

// Finitely supported signed measure on 𝕏_n.
struct DiscreteMeasure {
    SpaceSignature sig;
    std::vector<Atom> atoms;

    double total_mass() const {
        double s = 0;
        for (const auto& a : atoms) s += a.weight;
        return s;
    }
    double total_variation() const {
        double s = 0;
        for (const auto& a : atoms) s += std::abs(a.weight);
        return s;
    }
    bool empty() const { return atoms.empty(); }
};

// Merge coincident atoms (sup-norm within merge_tol; 0 = exact) and drop
// weights below 1e−15 × total variation.  Atom order is made deterministic
// by lexicographic point sort.
inline DiscreteMeasure normalize(const DiscreteMeasure& mu, double merge_tol = 0) {
    DiscreteMeasure out{mu.sig, {}};
    if (mu.atoms.empty()) return out;
    std::vector<Atom> atoms = mu.atoms;
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return compare_points(a.point, b.point) < 0; });
    if (merge_tol <= 0) {
        for (auto& a : atoms) {
            if (!out.atoms.empty() && compare_points(out.atoms.back().point, a.point) == 0) {
                out.atoms.back().weight += a.weight;
            } else {
                out.atoms.push_back(a);
            }
        }
    } else {
        // fuzzy merge is only used on tiny measures; quadratic is fine
        std::vector<bool> used(atoms.size(), false);
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (used[i]) continue;
            Atom acc = atoms[i];
            for (std::size_t j = i + 1; j < atoms.size(); ++j) {
                if (!used[j] && point_sup_dist(acc.point, atoms[j].point) <= merge_tol) {
                    acc.weight += atoms[j].weight;
                    used[j] = true;
                }
            }
            out.atoms.push_back(acc);
        }
    }
    double tv = 0;
    for (const auto& a : out.atoms) tv += std::abs(a.weight);
    const double cutoff = tol::weight_zero * tv;
    out.atoms.erase(std::remove_if(out.atoms.begin(), out.atoms.end(),
                                   [&](const Atom& a) { return std::abs(a.weight) <= cutoff; }),
                    out.atoms.end());
    return out;
}

inline SpaceSignature sub_signature(const SpaceSignature& sig, const SubsetIndex& f) {
    SpaceSignature s;
    s.n = static_cast<int>(f.members.size());
    for (int m : f.members) s.dims.push_back(sig.dims[static_cast<std::size_t>(m - 1)]);
    return s;
}

// Joint marginal onto the factors in F (kept in F's sorted order).
inline DiscreteMeasure marginal(const DiscreteMeasure& mu, const SubsetIndex& f) {
    if (f.members.empty()) throw std::invalid_argument("marginal: F must be nonempty");
    DiscreteMeasure out{sub_signature(mu.sig, f), {}};
    out.atoms.reserve(mu.atoms.size());
    for (const auto& a : mu.atoms) {
        ProductPoint p;
        for (int m : f.members) p.comps.push_back(a.point.comps[static_cast<std::size_t>(m - 1)]);
        out.atoms.push_back({std::move(p), a.weight});
    }
    return normalize(out);
}

// Kronecker product of measures on consecutive factor groups.
inline DiscreteMeasure product(const std::vector<DiscreteMeasure>& blocks) {
    if (blocks.empty()) throw std::invalid_argument("product: need at least one block");
    DiscreteMeasure out = blocks[0];
    for (std::size_t b = 1; b < blocks.size(); ++b) {
        DiscreteMeasure next;
        next.sig.n = out.sig.n + blocks[b].sig.n;
        next.sig.dims = out.sig.dims;
        next.sig.dims.insert(next.sig.dims.end(), blocks[b].sig.dims.begin(), blocks[b].sig.dims.end());
        next.atoms.reserve(out.atoms.size() * blocks[b].atoms.size());
        for (const auto& x : out.atoms) {
            for (const auto& y : blocks[b].atoms) {
                ProductPoint p = x.point;
                p.comps.insert(p.comps.end(), y.point.comps.begin(), y.point.comps.end());
                next.atoms.push_back({std::move(p), x.weight * y.weight});
            }
        }
        out = std::move(next);
    }
    return normalize(out);
}

// Reassemble measures living on disjoint factor subsets into a measure on the
// full signature (coordinates routed back to their original slots).
inline DiscreteMeasure assemble_product(const SpaceSignature& sig,
                                        const std::vector<std::pair<SubsetIndex, DiscreteMeasure>>& parts) {
    DiscreteMeasure out{sig, {}};
    std::vector<std::size_t> cursor(parts.size(), 0);
    // iterate the full cross product of part atoms
    std::size_t count = 1;
    for (const auto& pr : parts) {
        count *= pr.second.atoms.size();
        if (count == 0) return out;
        if (count > 20000000) throw capacity_error("assemble_product: atom cross product too large");
    }
    out.atoms.reserve(count);
    for (std::size_t flat = 0; flat < count; ++flat) {
        std::size_t rem = flat;
        ProductPoint p;
        p.comps.resize(static_cast<std::size_t>(sig.n));
        double w = 1;
        for (std::size_t pi = 0; pi < parts.size(); ++pi) {
            const auto& meas = parts[pi].second;
            std::size_t idx = rem % meas.atoms.size();
            rem /= meas.atoms.size();
            const auto& atom = meas.atoms[idx];
            const auto& members = parts[pi].first.members;
            for (std::size_t mi = 0; mi < members.size(); ++mi) {
                p.comps[static_cast<std::size_t>(members[mi] - 1)] = atom.point.comps[mi];
            }
            w *= atom.weight;
        }
        out.atoms.push_back({std::move(p), w});
    }
    return out;
}

// μ ∈ M_k: every (k−1)-marginal vanishes (F = ∅ means total mass, k = 1).
// Equivalent to the rectangle definition for finitely supported measures.
inline bool in_Mk(const DiscreteMeasure& mu, int k, double tol_rel = tol::rel_check) {
    if (k <= 0) return true;
    const double scale = std::max(mu.total_variation(), 1.0);
    if (k == 1) return std::abs(mu.total_mass()) <= tol_rel * scale;
    for (const auto& f : subsets_of_size(mu.sig.n, k - 1)) {
        if (marginal(mu, f).total_variation() > tol_rel * scale) return false;
    }
    // (k−1)-marginals vanishing implies all lower ones do, total mass included.
    return true;
}

// μ ∈ M_{a,b}(𝕏_n × 𝕐_m): the first `split` factors are the X side.
// For every F among X-factors with |F| = a−1, the marginal onto F ∪ (all
// Y-factors) vanishes; symmetrically on the Y side.  a = 0 / b = 0 impose
// nothing on that side.
inline bool in_Mab(const DiscreteMeasure& mu, int a, int b, int split, double tol_rel = tol::rel_check) {
    const int n = split, m = mu.sig.n - split;
    if (split < 0 || split > mu.sig.n) throw std::invalid_argument("in_Mab: split out of range");
    if (a < 0 || a > n || b < 0 || b > m) throw std::invalid_argument("in_Mab: invalid (a, b)");
    const double scale = std::max(mu.total_variation(), 1.0);
    auto side_ok = [&](int order, int lo, int hi, int other_lo, int other_hi) {
        if (order <= 0) return true;
        for (const auto& f : subsets_of_size(hi - lo, order - 1)) {
            SubsetIndex g{mu.sig.n, {}};
            for (int v : f.members) g.members.push_back(lo + v);
            for (int v = other_lo + 1; v <= other_hi; ++v) g.members.push_back(v);
            std::sort(g.members.begin(), g.members.end());
            if (order == 1 && g.members.empty()) {
                if (std::abs(mu.total_mass()) > tol_rel * scale) return false;
                continue;
            }
            if (marginal(mu, g).total_variation() > tol_rel * scale) return false;
        }
        return true;
    };
    return side_ok(a, 0, n, n, mu.sig.n) && side_ok(b, n, mu.sig.n, 0, n);
}

// Λⁿ_k[P,Q] = P + Σ_{j=0}^{k−1} (−1)^{k−j} C(n−j−1, n−k) Σ_{|F|=j} P_F × Q_{F^c}
inline DiscreteMeasure lancaster(const DiscreteMeasure& P, const DiscreteMeasure& Q, int k) {
    const int n = P.sig.n;
    if (!(Q.sig == P.sig)) throw std::invalid_argument("lancaster: P and Q signatures differ");
    if (k < 1 || k > n) throw std::invalid_argument("lancaster: need 1 <= k <= n");
    if (std::abs(P.total_mass() - 1.0) > 1e-9 || std::abs(Q.total_mass() - 1.0) > 1e-9) {
        throw std::invalid_argument("lancaster: P and Q must be probabilities");
    }
    // capacity estimate before expanding anything
    std::size_t estimate = P.atoms.size();
    for (int j = 0; j < k; ++j) {
        double per = std::pow(static_cast<double>(std::max(P.atoms.size(), Q.atoms.size())), 2.0);
        estimate += static_cast<std::size_t>(std::min(per, 1e16)) * static_cast<std::size_t>(binomial(n, j));
        if (estimate > 10000000) {
            throw capacity_error("lancaster: expansion exceeds 1e7 atoms (estimated " +
                                 std::to_string(estimate) + ")");
        }
    }
    DiscreteMeasure acc = P;
    for (int j = 0; j < k; ++j) {
        const double coeff = ((k - j) % 2 == 0 ? 1.0 : -1.0) *
                             static_cast<double>(binomial(n - j - 1, n - k));
        for (const auto& f : subsets_of_size(n, j)) {
            const SubsetIndex fc = complement(f);
            std::vector<std::pair<SubsetIndex, DiscreteMeasure>> parts;
            if (!f.members.empty()) parts.emplace_back(f, marginal(P, f));
            parts.emplace_back(fc, marginal(Q, fc));
            DiscreteMeasure term = assemble_product(P.sig, parts);
            for (auto& a : term.atoms) {
                a.weight *= coeff;
                acc.atoms.push_back(std::move(a));
            }
        }
    }
    return normalize(acc);
}

// Λⁿ_k[P] := Λⁿ_k[P, ×_i P_i]
inline DiscreteMeasure lancaster_self(const DiscreteMeasure& P, int k) {
    std::vector<DiscreteMeasure> margs;
    for (int i = 1; i <= P.sig.n; ++i) margs.push_back(marginal(P, SubsetIndex{P.sig.n, {i}}));
    return lancaster(P, product(margs), k);
}

// Σ[P] = Σ_π (−1)^{|π|−1}(|π|−1)! P_π over all set partitions of {1..n}
inline DiscreteMeasure streitberg(const DiscreteMeasure& P) {
    const int n = P.sig.n;
    if (n > 8) throw capacity_error("streitberg: n > 8 (Bell blowup)");
    if (std::abs(P.total_mass() - 1.0) > 1e-9) throw std::invalid_argument("streitberg: P must be a probability");
    DiscreteMeasure acc{P.sig, {}};
    for (const auto& pi : enumerate_partitions(n)) {
        const double a_pi = static_cast<double>(streitberg_coefficient(pi));
        std::vector<std::pair<SubsetIndex, DiscreteMeasure>> parts;
        for (const auto& blk : pi.blocks) parts.emplace_back(blk, marginal(P, blk));
        DiscreteMeasure term = assemble_product(P.sig, parts);
        for (auto& a : term.atoms) {
            a.weight *= a_pi;
            acc.atoms.push_back(std::move(a));
        }
    }
    return normalize(acc);
}

inline DiscreteMeasure dirac(const SpaceSignature& sig, const ProductPoint& x) {
    return DiscreteMeasure{sig, {{x, 1.0}}};
}

// μⁿ_k[x₁,x₂] = Λⁿ_k[δ_{x₁}, δ_{x₂}]
inline DiscreteMeasure mu_k(const SpaceSignature& sig, const ProductPoint& x1, const ProductPoint& x2, int k) {
    return lancaster(dirac(sig, x1), dirac(sig, x2), k);
}

// δⁿ_2[x₁,x₂] = μⁿ_2[x₁,x₂] + μⁿ_2[x₂,x₁]
//             = n δ_{x₁} − Σ_i δ_{x_{1⃗+e_i}} − Σ_i δ_{x_{2⃗−e_i}} + n δ_{x₂}
inline DiscreteMeasure delta2(const SpaceSignature& sig, const ProductPoint& x1, const ProductPoint& x2) {
    const int n = sig.n;
    DiscreteMeasure out{sig, {}};
    out.atoms.push_back({x1, static_cast<double>(n)});
    out.atoms.push_back({x2, static_cast<double>(n)});
    for (int i = 0; i < n; ++i) {
        ProductPoint a = x1;  // x_{1⃗+e_i}: coordinate i taken from x₂
        a.comps[static_cast<std::size_t>(i)] = x2.comps[static_cast<std::size_t>(i)];
        out.atoms.push_back({std::move(a), -1.0});
        ProductPoint b = x2;  // x_{2⃗−e_i}: coordinate i taken from x₁
        b.comps[static_cast<std::size_t>(i)] = x1.comps[static_cast<std::size_t>(i)];
        out.atoms.push_back({std::move(b), -1.0});
    }
    return normalize(out);
}

inline DiscreteMeasure empirical(const SpaceSignature& sig, const std::vector<ProductPoint>& samples) {
    if (samples.empty()) throw std::invalid_argument("empirical: need at least one sample");
    DiscreteMeasure out{sig, {}};
    const double w = 1.0 / static_cast<double>(samples.size());
    for (const auto& s : samples) out.atoms.push_back({s, w});
    return normalize(out);
}

// Reproducible pseudo-random nonzero element of M_k: a signed combination of
// two products of per-factor measures, k factors of each product centered to
// total mass 0 (pigeonhole ⇒ the product is in M_k).
inline DiscreteMeasure random_Mk(const SpaceSignature& sig, int k, int atoms_per_factor, std::uint64_t seed) {
    if (k < 1 || k > sig.n) throw std::invalid_argument("random_Mk: need 1 <= k <= n");
    if (atoms_per_factor < 2) throw std::invalid_argument("random_Mk: need >= 2 atoms per factor");
    CounterRng rng(seed, /*stream=*/0x4d6b);
    auto one_product = [&]() {
        // choose k distinct factors to center
        std::vector<int> order(static_cast<std::size_t>(sig.n));
        for (int i = 0; i < sig.n; ++i) order[static_cast<std::size_t>(i)] = i;
        for (int i = sig.n - 1; i > 0; --i) {
            std::swap(order[static_cast<std::size_t>(i)],
                      order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
        }
        std::vector<bool> centered(static_cast<std::size_t>(sig.n), false);
        for (int i = 0; i < k; ++i) centered[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;
        std::vector<DiscreteMeasure> factors;
        for (int i = 0; i < sig.n; ++i) {
            DiscreteMeasure f{SpaceSignature{1, {sig.dims[static_cast<std::size_t>(i)]}}, {}};
            for (int a = 0; a < atoms_per_factor; ++a) {
                Eigen::VectorXd p(sig.dims[static_cast<std::size_t>(i)]);
                for (int d = 0; d < p.size(); ++d) p[d] = rng.uniform(-1.0, 1.0);
                f.atoms.push_back({ProductPoint{{p}}, rng.uniform(0.25, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0)});
            }
            if (centered[static_cast<std::size_t>(i)]) {
                double mean = f.total_mass() / static_cast<double>(atoms_per_factor);
                for (auto& a : f.atoms) a.weight -= mean;
            }
            factors.push_back(normalize(f));
        }
        return product(factors);
    };
    DiscreteMeasure a = one_product();
    DiscreteMeasure b = one_product();
    const double sb = rng.uniform(-1.0, 1.0);
    for (auto& at : b.atoms) {
        at.weight *= sb;
        a.atoms.push_back(std::move(at));
    }
    DiscreteMeasure out = normalize(a);
    if (out.empty()) return random_Mk(sig, k, atoms_per_factor, seed + 0x9e3779b9ULL);
    return out;
}

// Hahn–Jordan style sign split: (positive part, negative part) of the atoms.
// No normalization constant is chosen here.
inline std::pair<DiscreteMeasure, DiscreteMeasure> sign_split(const DiscreteMeasure& mu) {
    DiscreteMeasure pos{mu.sig, {}}, neg{mu.sig, {}};
    for (const auto& a : mu.atoms) {
        if (a.weight >= 0) {
            pos.atoms.push_back(a);
        } else {
            neg.atoms.push_back({a.point, -a.weight});
        }
    }
    return {pos, neg};
}

}  // namespace pdi
