#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "pdi/kernels.hpp"
#include "pdi/measures.hpp"

namespace pdi {

// Row-aligned joint observations: sample j = (x_1^j, …, x_n^j).
struct Dataset {
    SpaceSignature sig;
    std::vector<ProductPoint> samples;
};

enum class InteractionMode { Lancaster, Streitberg };

enum class Engine { Naive, Fast, Auto };

struct TestConfig {
    int k = 2;
    InteractionMode interaction = InteractionMode::Lancaster;
    PDIKernelSpec kernel;
    int permutations = 0;
    std::uint64_t seed = 0;
    Engine engine = Engine::Auto;
};

struct TestReport {
    double statistic = 0;
    std::optional<double> p_value;
    int N = 0, n = 0, k = 0, B = 0;
    std::uint64_t seed = 0;
    std::string engine;
    std::string null_model;  // "full-independence" or "heuristic-block-permutation"
    std::string kernel_name;
    std::string interaction;
    double elapsed_ms = 0;
};

// S = (−1)^k Σ_{(u,a)} Σ_{(v,b)} a·b·𝕴(u,v)
inline double naive_stat(const PDIKernelSpec& spec, const DiscreteMeasure& mu, int k) {
    const std::size_t pairs = mu.atoms.size() * mu.atoms.size();
    if (pairs > 100000000ULL) {
        throw capacity_error("naive_stat: " + std::to_string(pairs) + " atom pairs exceeds 1e8 guard");
    }
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const std::size_t m = mu.atoms.size();
    std::vector<double> rows(m, 0.0);
    parallel_for(m, [&](std::size_t i) {
        const auto& a = mu.atoms[i];
        double acc = 0;
        for (const auto& b : mu.atoms) {
            acc += a.weight * b.weight * pdi_eval(spec, a.point, b.point);
        }
        rows[i] = acc;
    });
    double s = 0;
    for (double r : rows) s += r;  // sequential reduction keeps the sum deterministic
    return sign * s;
}

// Tolerance scale for statistic comparisons: Σ|w_a||w_b|·max|𝕴| over a
// 64-pair subsample.
inline double statistic_scale(const PDIKernelSpec& spec, const DiscreteMeasure& mu) {
    double tv = mu.total_variation();
    double kmax = 0;
    const std::size_t m = mu.atoms.size();
    if (m == 0) return 1.0;
    const std::size_t step = std::max<std::size_t>(1, (m * m) / 64);
    for (std::size_t flat = 0; flat < m * m; flat += step) {
        const auto& a = mu.atoms[flat / m];
        const auto& b = mu.atoms[flat % m];
        kmax = std::max(kmax, std::abs(pdi_eval(spec, a.point, b.point)));
    }
    return std::max(1e-300, tv * tv * kmax);
}

// Builds P̂ from the data, expands the chosen interaction measure, and
// evaluates the V-statistic on it.
inline double interaction_stat(const PDIKernelSpec& spec, const Dataset& data, int k, InteractionMode mode) {
    const DiscreteMeasure P = empirical(data.sig, data.samples);
    DiscreteMeasure mu;
    if (mode == InteractionMode::Streitberg) {
        if (k != data.sig.n) throw std::invalid_argument("interaction_stat: streitberg requires k = n");
        mu = streitberg(P);
    } else {
        mu = lancaster_self(P, k);
    }
    return naive_stat(spec, mu, k);
}

// The dcov-style kronecker structure the fast path needs: one single-block
// order-1 power(a=1) leaf per factor.  Returns the component γ's if so.
inline std::optional<std::vector<ComponentCND>> kronecker_cnd_structure(const PDIKernelSpec& spec) {
    if (spec.kind != PDIKernelSpec::Kind::Kronecker) return std::nullopt;
    std::vector<ComponentCND> gs;
    for (const auto& f : spec.factors) {
        if (f.kind != PDIKernelSpec::Kind::SumForm || f.sig.n != 1 || f.order != 1 ||
            f.psi.kind != CMFunctionSpec::Kind::Power || f.psi.a != 1.0) {
            return std::nullopt;
        }
        gs.push_back(f.gammas[0]);
    }
    return gs;
}

inline std::vector<Eigen::MatrixXd> multivariance_grams(const std::vector<ComponentCND>& gammas,
                                                        const Dataset& data) {
    const int n = data.sig.n;
    const Eigen::Index N = static_cast<Eigen::Index>(data.samples.size());
    std::vector<Eigen::MatrixXd> tildes;
    for (int i = 0; i < n; ++i) {
        if (!gammas[static_cast<std::size_t>(i)].zero_diagonal()) {
            throw std::invalid_argument("fast_multivariance: component kernels must be zero-diagonal CND");
        }
        Eigen::MatrixXd A(N, N);
        for (Eigen::Index a = 0; a < N; ++a) {
            for (Eigen::Index b = 0; b < N; ++b) {
                A(a, b) = -cnd_eval(gammas[static_cast<std::size_t>(i)],
                                    data.samples[static_cast<std::size_t>(a)].comps[static_cast<std::size_t>(i)],
                                    data.samples[static_cast<std::size_t>(b)].comps[static_cast<std::size_t>(i)]);
            }
        }
        const Eigen::VectorXd rm = A.rowwise().mean();
        const Eigen::VectorXd cm = A.colwise().mean();
        const double gm = A.mean();
        A.colwise() -= rm;
        A.rowwise() -= cm.transpose();
        A.array() += gm;
        tildes.push_back(std::move(A));
    }
    return tildes;
}

// Distance-multivariance fast path: (1/N²) Σ_{a,b} Π_i Ã_i(a,b) with Ã_i the
// double-centered Gram of −γ_i.  Equals the naive Λⁿ_n expansion.
inline double fast_multivariance(const std::vector<ComponentCND>& gammas, const Dataset& data) {
    auto tildes = multivariance_grams(gammas, data);
    const Eigen::Index N = static_cast<Eigen::Index>(data.samples.size());
    double s = 0;
    for (Eigen::Index a = 0; a < N; ++a) {
        for (Eigen::Index b = 0; b < N; ++b) {
            double p = 1;
            for (const auto& t : tildes) p *= t(a, b);
            s += p;
        }
    }
    return s / static_cast<double>(N * N);
}

namespace detail {

inline std::vector<std::size_t> block_permutation(std::size_t N, CounterRng& rng) {
    std::vector<std::size_t> p(N);
    for (std::size_t i = 0; i < N; ++i) p[i] = i;
    for (std::size_t i = N - 1; i > 0; --i) {
        std::swap(p[i], p[rng.below(i + 1)]);
    }
    return p;
}

// Permute each coordinate block's sample order independently; replicate b
// draws from the (seed, b) stream.
inline Dataset permuted_dataset(const Dataset& data, std::uint64_t seed, std::uint64_t b) {
    CounterRng rng(seed, b);
    const std::size_t N = data.samples.size();
    Dataset out{data.sig, data.samples};
    for (int i = 0; i < data.sig.n; ++i) {
        auto perm = block_permutation(N, rng);
        for (std::size_t j = 0; j < N; ++j) {
            out.samples[j].comps[static_cast<std::size_t>(i)] =
                data.samples[perm[j]].comps[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

}  // namespace detail

inline TestReport permutation_test(const TestConfig& cfg, const Dataset& data) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = data.sig.n;
    const std::size_t N = data.samples.size();

    auto structure = kronecker_cnd_structure(cfg.kernel);
    bool use_fast = false;
    if (cfg.engine == Engine::Fast) {
        if (!structure || cfg.k != n || cfg.interaction != InteractionMode::Lancaster) {
            throw std::invalid_argument(
                "engine=fast requires a kronecker-of-CND kernel with k = n and lancaster interaction");
        }
        use_fast = true;
    } else if (cfg.engine == Engine::Auto) {
        use_fast = structure.has_value() && cfg.k == n && cfg.interaction == InteractionMode::Lancaster;
    }

    auto statistic_of = [&](const Dataset& d) {
        return use_fast ? fast_multivariance(*structure, d)
                        : interaction_stat(cfg.kernel, d, cfg.k, cfg.interaction);
    };

    TestReport rep;
    rep.statistic = statistic_of(data);
    rep.N = static_cast<int>(N);
    rep.n = n;
    rep.k = cfg.k;
    rep.B = cfg.permutations;
    rep.seed = cfg.seed;
    rep.engine = use_fast ? "fast" : "naive";
    rep.kernel_name = cfg.kernel.name;
    rep.interaction = cfg.interaction == InteractionMode::Lancaster ? "lancaster" : "streitberg";
    rep.null_model = (cfg.k > 2 && cfg.k < n) ? "heuristic-block-permutation" : "full-independence";

    if (cfg.permutations > 0) {
        const std::size_t B = static_cast<std::size_t>(cfg.permutations);
        std::vector<double> stats(B);
        // For the fast engine the centered Grams are permutation-covariant, so
        // replicates only shuffle indices of precomputed matrices.
        if (use_fast) {
            auto tildes = multivariance_grams(*structure, data);
            parallel_for(B, [&](std::size_t bi) {
                CounterRng rng(cfg.seed, bi + 1);
                std::vector<std::vector<std::size_t>> perms;
                for (int i = 0; i < n; ++i) perms.push_back(detail::block_permutation(N, rng));
                double s = 0;
                for (std::size_t a = 0; a < N; ++a) {
                    for (std::size_t b = 0; b < N; ++b) {
                        double p = 1;
                        for (int i = 0; i < n; ++i) {
                            p *= tildes[static_cast<std::size_t>(i)](
                                static_cast<Eigen::Index>(perms[static_cast<std::size_t>(i)][a]),
                                static_cast<Eigen::Index>(perms[static_cast<std::size_t>(i)][b]));
                        }
                        s += p;
                    }
                }
                stats[bi] = s / static_cast<double>(N * N);
            });
        } else {
            parallel_for(B, [&](std::size_t bi) {
                stats[bi] = statistic_of(detail::permuted_dataset(data, cfg.seed, bi + 1));
            });
        }
        std::size_t ge = 0;
        for (double s : stats) {
            if (s >= rep.statistic) ++ge;
        }
        rep.p_value = static_cast<double>(1 + ge) / static_cast<double>(cfg.permutations + 1);
    }
    rep.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------
enum class SyntheticKind { Independent, XorTriple, Decomposable, CommonFactor };

struct SyntheticParams {
    int n = 2;                     // number of factors (scalar factors unless stated)
    std::vector<int> block_split;  // decomposable: sizes of the dependent groups
    double loading = 0.8;          // common_factor loading
};

inline Dataset generate_synthetic(SyntheticKind kind, const SyntheticParams& params, int N,
                                  std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("generate_synthetic: need N >= 1");
    CounterRng rng(seed, 0x67656eULL);
    Dataset d;
    switch (kind) {
        case SyntheticKind::Independent: {
            if (params.n < 1) throw std::invalid_argument("independent: need n >= 1");
            d.sig = SpaceSignature{params.n, std::vector<int>(static_cast<std::size_t>(params.n), 1)};
            for (int j = 0; j < N; ++j) {
                ProductPoint p;
                for (int i = 0; i < params.n; ++i) {
                    p.comps.push_back(Eigen::VectorXd::Constant(1, rng.normal()));
                }
                d.samples.push_back(std::move(p));
            }
            break;
        }
        case SyntheticKind::XorTriple: {
            d.sig = SpaceSignature{3, {1, 1, 1}};
            for (int j = 0; j < N; ++j) {
                const double x = rng.uniform() < 0.5 ? 0.0 : 1.0;
                const double y = rng.uniform() < 0.5 ? 0.0 : 1.0;
                const double z = (x != y) ? 1.0 : 0.0;  // X ⊕ Y, always even parity rows
                d.samples.push_back(ProductPoint{{Eigen::VectorXd::Constant(1, x),
                                                  Eigen::VectorXd::Constant(1, y),
                                                  Eigen::VectorXd::Constant(1, z)}});
            }
            break;
        }
        case SyntheticKind::Decomposable: {
            std::vector<int> split = params.block_split;
            if (split.empty()) split = {2, 1};
            int n = 0;
            for (int s : split) {
                if (s < 1) throw std::invalid_argument("decomposable: bad block split");
                n += s;
            }
            d.sig = SpaceSignature{n, std::vector<int>(static_cast<std::size_t>(n), 1)};
            for (int j = 0; j < N; ++j) {
                ProductPoint p;
                for (int g = 0; g < static_cast<int>(split.size()); ++g) {
                    const double latent = rng.normal();  // shared inside the group only
                    for (int i = 0; i < split[static_cast<std::size_t>(g)]; ++i) {
                        p.comps.push_back(Eigen::VectorXd::Constant(1, latent + 0.2 * rng.normal()));
                    }
                }
                d.samples.push_back(std::move(p));
            }
            break;
        }
        case SyntheticKind::CommonFactor: {
            if (params.n < 1) throw std::invalid_argument("common_factor: need n >= 1");
            if (!(params.loading >= -1 && params.loading <= 1)) {
                throw std::invalid_argument("common_factor: loading must be in [-1, 1]");
            }
            d.sig = SpaceSignature{params.n, std::vector<int>(static_cast<std::size_t>(params.n), 1)};
            const double lam = params.loading;
            const double res = std::sqrt(std::max(0.0, 1.0 - lam * lam));
            for (int j = 0; j < N; ++j) {
                const double z = rng.normal();
                ProductPoint p;
                for (int i = 0; i < params.n; ++i) {
                    p.comps.push_back(Eigen::VectorXd::Constant(1, lam * z + res * rng.normal()));
                }
                d.samples.push_back(std::move(p));
            }
            break;
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Ready-made PDI_k kernel library (used by tests, verify, and CLI presets)
// ---------------------------------------------------------------------------
inline SpaceSignature scalar_signature(int n) {
    return SpaceSignature{n, std::vector<int>(static_cast<std::size_t>(n), 1)};
}

inline std::vector<ComponentCND> default_gammas(int n, double beta = 1.0) {
    return std::vector<ComponentCND>(static_cast<std::size_t>(n), ComponentCND::euclidean_power(beta));
}

inline PDIKernelSpec dcov_kernel(const SpaceSignature& sig) {
    std::vector<PDIKernelSpec> leaves;
    for (int i = 0; i < sig.n; ++i) {
        leaves.push_back(PDIKernelSpec::sum_form(
            SpaceSignature{1, {sig.dims[static_cast<std::size_t>(i)]}}, CMFunctionSpec::power(1.0, 1),
            {ComponentCND::euclidean_power(1.0)}, "dcov-leaf"));
    }
    return PDIKernelSpec::kronecker(std::move(leaves), "dcov");
}

inline PDIKernelSpec dhsic_gauss_kernel(const SpaceSignature& sig, double rate = 1.0) {
    std::vector<PDIKernelSpec> leaves;
    for (int i = 0; i < sig.n; ++i) {
        leaves.push_back(PDIKernelSpec::sum_form(
            SpaceSignature{1, {sig.dims[static_cast<std::size_t>(i)]}},
            CMFunctionSpec::exponential(rate, 1), {ComponentCND::squared_euclidean()}, "dhsic-leaf"));
    }
    return PDIKernelSpec::kronecker(std::move(leaves), "dhsic-gauss");
}

// The library of order-k kernels on the given signature, each tagged with its
// SPDI status.  Orders and strictness follow the radial and sum-form SPDI
// theorems.
inline std::vector<PDIKernelSpec> library_kernels(const SpaceSignature& sig, int k) {
    const int n = sig.n;
    if (k < 1 || k > n) throw std::invalid_argument("library_kernels: need 1 <= k <= n");
    std::vector<PDIKernelSpec> out;
    out.push_back(PDIKernelSpec::sum_form(sig, CMFunctionSpec::power(k - 0.5, k), default_gammas(n),
                                          "pow:" + std::to_string(k - 0.5)));
    if (k >= 2) {
        out.push_back(PDIKernelSpec::sum_form(sig, CMFunctionSpec::log_power(k), default_gammas(n),
                                              "logpow:" + std::to_string(k)));
    }
    out.push_back(PDIKernelSpec::sum_form(sig, CMFunctionSpec::exponential(1.0, k),
                                          default_gammas(n, 2.0), "expmix"));
    out.push_back(PDIKernelSpec::sum_form(
        sig, CMFunctionSpec::mixture((k % 2 == 0) ? 0.3 : -0.3, {{0.5, 1.0}, {2.0, 0.7}}, k),
        default_gammas(n), "cm-mixture"));
    if (k == n) {
        out.push_back(PDIKernelSpec::bernstein(
            sig, BernsteinSpecK::order_n(n, {{Eigen::VectorXd::Ones(n), 1.0}}), default_gammas(n),
            "bernstein-atom:1"));
        out.push_back(PDIKernelSpec::bernstein(
            sig,
            BernsteinSpecK::order_n(n, {{Eigen::VectorXd::Zero(n), 0.5},
                                        {Eigen::VectorXd::Constant(n, 2.0), 0.5}}),
            default_gammas(n), "bernstein-mix"));
        out.push_back(dcov_kernel(sig));
    } else {
        out.push_back(PDIKernelSpec::bernstein(
            sig,
            BernsteinSpecK::order_k(n, k, {{Eigen::VectorXd::Ones(n), 1.0},
                                           {Eigen::VectorXd::Constant(n, 0.5), 0.5}}),
            default_gammas(n), "bernstein-k-atoms"));
    }
    return out;
}

}  // namespace pdi
