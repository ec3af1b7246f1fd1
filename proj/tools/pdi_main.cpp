// pdi — generalized kernel independence tests of order k on product spaces.
//   pdi test    run an interaction V-statistic + permutation p-value on a CSV
//   pdi verify  run the numeric verification suites
//   pdi gen     write synthetic datasets

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>

#include "pdi/cli.hpp"
#include "pdi/verify.hpp"

namespace {

int cmd_test(const std::string& input, const std::string& blocks_arg, const std::string& kernel_arg,
             int k, const std::string& interaction, int perms, std::uint64_t seed,
             const std::string& engine, const std::string& out_path) {
    const pdi::cli::ColumnBlocks blocks = pdi::cli::parse_blocks(blocks_arg);
    const pdi::Dataset data = pdi::cli::load_csv(input, blocks);
    pdi::TestConfig cfg;
    cfg.kernel = pdi::cli::resolve_kernel(kernel_arg, data.sig);
    cfg.k = k > 0 ? k : cfg.kernel.order;
    if (cfg.k != cfg.kernel.order) {
        throw pdi::cli::usage_error("--k " + std::to_string(cfg.k) + " does not match kernel order " +
                                    std::to_string(cfg.kernel.order));
    }
    if (interaction == "lancaster") {
        cfg.interaction = pdi::InteractionMode::Lancaster;
    } else if (interaction == "streitberg") {
        cfg.interaction = pdi::InteractionMode::Streitberg;
        if (cfg.k != data.sig.n) throw pdi::cli::usage_error("streitberg requires --k equal to n");
    } else {
        throw pdi::cli::usage_error("--interaction must be lancaster or streitberg");
    }
    if (perms < 0) throw pdi::cli::usage_error("--perms must be >= 0");
    cfg.permutations = perms;
    cfg.seed = seed;
    if (engine == "naive") {
        cfg.engine = pdi::Engine::Naive;
    } else if (engine == "fast") {
        cfg.engine = pdi::Engine::Fast;
    } else if (engine == "auto") {
        cfg.engine = pdi::Engine::Auto;
    } else {
        throw pdi::cli::usage_error("--engine must be naive, fast, or auto");
    }

    pdi::TestReport rep;
    try {
        rep = pdi::permutation_test(cfg, data);
    } catch (const std::invalid_argument& e) {
        throw pdi::cli::usage_error(e.what());
    }
    const nlohmann::json j = pdi::cli::report_json(rep);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw pdi::cli::data_error("cannot write '" + out_path + "'");
        out << j.dump(2) << "\n";
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int trials, bool extended) {
    using pdi::cli::fmt17;
    bool all_ok = true;
    const bool want_all = suite == "all";
    auto banner = [](const std::string& name) { std::cout << "== suite: " << name << " ==\n"; };

    if (want_all || suite == "psd") {
        banner("psd");
        pdi::CounterRng rng(seed, 0x505344);
        double worst = 0;
        int checked = 0;
        for (int n = 2; n <= 4; ++n) {
            const pdi::SpaceSignature sig = pdi::scalar_signature(n);
            for (int k = 1; k <= n; ++k) {
                for (const auto& spec : pdi::library_kernels(sig, k)) {
                    for (int rep = 0; rep < std::max(1, trials / 10); ++rep) {
                        std::vector<pdi::ProductPoint> pts;
                        const int m = 4 + static_cast<int>(rng.below(9));
                        for (int i = 0; i < m; ++i) {
                            pdi::ProductPoint p;
                            for (int c = 0; c < n; ++c) {
                                p.comps.push_back(Eigen::VectorXd::Constant(1, rng.uniform(-1, 1)));
                            }
                            pts.push_back(std::move(p));
                        }
                        pdi::ProductPoint x0 = pts.back();
                        pts.pop_back();
                        Eigen::MatrixXd G = pdi::gram(
                            [&](const pdi::ProductPoint& a, const pdi::ProductPoint& b) {
                                return pdi::induced_pd_eval(spec, k, x0, a, b);
                            },
                            pts);
                        ++checked;
                        if (!pdi::verify::psd_check(G)) {
                            all_ok = false;
                            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
                            worst = std::min(worst, es.eigenvalues().minCoeff());
                        }
                    }
                }
            }
        }
        std::cout << "psd grams checked=" << checked << " worst_negative_eigenvalue=" << fmt17(worst)
                  << (worst < 0 ? " FAIL" : " OK") << "\n";
    }
    if (want_all || suite == "appendix") {
        banner("appendix");
        pdi::CounterRng rng(seed, 0x415050);
        const int n_hi = extended ? 5 : 4;
        for (int n = 2; n <= n_hi; ++n) {
            const pdi::SpaceSignature sig = pdi::scalar_signature(n);
            pdi::PDIKernelSpec spec =
                n == 2 ? pdi::dcov_kernel(sig)
                       : pdi::PDIKernelSpec::bernstein(
                             sig,
                             pdi::BernsteinSpecK::order_k(n, 2,
                                                          {{Eigen::VectorXd::Ones(n), 1.0},
                                                           {Eigen::VectorXd::Constant(n, 0.5), 0.5}}),
                             pdi::default_gammas(n), "appendix-g");
            for (auto variant : {pdi::verify::AppendixVariant::General,
                                 pdi::verify::AppendixVariant::CompleteSymmetric}) {
                double worst = 0;
                for (int t = 0; t < trials; ++t) {
                    pdi::ProductPoint x1, x2, x3;
                    for (int c = 0; c < n; ++c) {
                        x1.comps.push_back(Eigen::VectorXd::Constant(1, rng.uniform(-1, 1)));
                        x2.comps.push_back(Eigen::VectorXd::Constant(1, rng.uniform(-1, 1)));
                        x3.comps.push_back(Eigen::VectorXd::Constant(1, rng.uniform(-1, 1)));
                    }
                    const double scale = 1.0 + std::abs(pdi::pdi_eval(spec, x1, x2));
                    worst = std::max(worst, pdi::verify::appendix_identity_residual(
                                                spec, n, x1, x2, x3, variant) /
                                                scale);
                }
                const bool ok = worst < 1e-9;
                all_ok = all_ok && ok;
                std::cout << "appendix n=" << n
                          << (variant == pdi::verify::AppendixVariant::General ? " general " : " complete ")
                          << "max_rel_residual=" << fmt17(worst) << (ok ? " OK" : " FAIL") << "\n";
            }
        }
    }
    if (want_all || suite == "inequalities") {
        banner("inequalities");
        for (const auto& rep : pdi::verify::inequality_suite(seed, trials)) {
            const bool ok = rep.max_abs_residual <= 1e-9;
            all_ok = all_ok && ok;
            std::cout << rep.name << " trials=" << rep.trials
                      << " max_violation=" << fmt17(rep.max_abs_residual) << (ok ? " OK" : " FAIL")
                      << "\n";
        }
    }
    if (want_all || suite == "kme") {
        banner("kme");
        pdi::CounterRng rng(seed, 0x4b4d45);
        double worst = 0;
        int count = 0;
        for (int n = 2; n <= 3; ++n) {
            const pdi::SpaceSignature sig = pdi::scalar_signature(n);
            for (int k = 1; k <= n; ++k) {
                for (const auto& spec : pdi::library_kernels(sig, k)) {
                    for (int t = 0; t < std::max(1, trials / 10); ++t) {
                        const pdi::DiscreteMeasure mu =
                            pdi::random_Mk(sig, k, 2, seed + static_cast<std::uint64_t>(count));
                        pdi::ProductPoint x0;
                        for (int c = 0; c < n; ++c) {
                            x0.comps.push_back(Eigen::VectorXd::Constant(1, rng.uniform(-1, 1)));
                        }
                        const double scale = pdi::statistic_scale(spec, mu);
                        worst = std::max(worst, pdi::verify::kme_equivalence_residual(spec, k, mu, x0) /
                                                    scale);
                        ++count;
                    }
                }
            }
        }
        const bool ok = worst < 1e-9;
        all_ok = all_ok && ok;
        std::cout << "kme triples=" << count << " max_rel_residual=" << fmt17(worst)
                  << (ok ? " OK" : " FAIL") << "\n";
    }
    if (want_all || suite == "kronecker") {
        banner("kronecker");
        const auto res = pdi::verify::kronecker_sign_check(seed, trials);
        all_ok = all_ok && res.pass;
        std::cout << "kronecker min_case2=" << fmt17(res.min_statistic_case2)
                  << " min_case3=" << fmt17(res.min_statistic_case3)
                  << " zero_witness=" << fmt17(res.zero_witness_statistic)
                  << (res.pass ? " OK" : " FAIL") << "\n";
    }
    return all_ok ? 0 : 4;  // 4 = verification failure (distinct from capacity/data errors)
}

int cmd_gen(const std::string& kind, int n, int N, std::uint64_t seed, double loading,
            const std::string& blocks_arg, const std::string& out_path) {
    pdi::SyntheticKind sk;
    pdi::SyntheticParams params;
    params.n = n;
    params.loading = loading;
    if (kind == "independent") {
        sk = pdi::SyntheticKind::Independent;
    } else if (kind == "xor_triple") {
        sk = pdi::SyntheticKind::XorTriple;
    } else if (kind == "decomposable") {
        sk = pdi::SyntheticKind::Decomposable;
        if (!blocks_arg.empty()) params.block_split = pdi::cli::parse_blocks(blocks_arg).widths;
    } else if (kind == "common_factor") {
        sk = pdi::SyntheticKind::CommonFactor;
    } else {
        throw pdi::cli::usage_error("unknown kind '" + kind + "'");
    }
    const pdi::Dataset d = pdi::generate_synthetic(sk, params, N, seed);
    std::ofstream out(out_path);
    if (!out) throw pdi::cli::data_error("cannot write '" + out_path + "'");
    for (int i = 0; i < d.sig.n; ++i) {
        for (int j = 0; j < d.sig.dims[static_cast<std::size_t>(i)]; ++j) {
            out << (i + j > 0 ? "," : "") << "f" << (i + 1) << "_" << (j + 1);
        }
    }
    out << "\n";
    for (const auto& s : d.samples) {
        bool first = true;
        for (const auto& c : s.comps) {
            for (int j = 0; j < c.size(); ++j) {
                out << (first ? "" : ",") << pdi::cli::fmt17(c[j]);
                first = false;
            }
        }
        out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pdi — kernel independence tests of order k on product spaces"};
    app.require_subcommand(1);

    std::string input, blocks = "1,1", kernel = "preset:dcov", interaction = "lancaster";
    std::string engine = "auto", out_path, suite = "all", kind = "independent";
    int k = 0, perms = 0, trials = 50, N = 100, n = 2;
    std::uint64_t seed = 0;
    double loading = 0.8;
    bool extended = false;

    auto* test = app.add_subcommand("test", "run an independence test on a CSV dataset");
    test->add_option("--input", input, "CSV path (header row, numeric body)")->required();
    test->add_option("--blocks", blocks, "comma-separated column widths per factor");
    test->add_option("--kernel", kernel, "preset:<name> or kernel spec file");
    test->add_option("--k", k, "interaction order (default: kernel order)");
    test->add_option("--interaction", interaction, "lancaster | streitberg");
    test->add_option("--perms", perms, "permutation replicates B (0 = statistic only)");
    test->add_option("--seed", seed, "RNG seed");
    test->add_option("--engine", engine, "naive | fast | auto");
    test->add_option("--out", out_path, "also write the JSON report here");

    auto* verify = app.add_subcommand("verify", "run the numeric verification suites");
    verify->add_option("--suite", suite, "all | psd | appendix | inequalities | kme | kronecker");
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--trials", trials, "trials per suite");
    verify->add_flag("--extended", extended, "include the quarantined n=5 appendix identity");

    auto* gen = app.add_subcommand("gen", "write a synthetic dataset CSV");
    gen->add_option("--kind", kind, "independent | xor_triple | decomposable | common_factor");
    gen->add_option("--n", n, "number of factors (independent / common_factor)");
    gen->add_option("--n-samples", N, "rows to generate")->required();
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--loading", loading, "common_factor loading");
    gen->add_option("--blocks", blocks, "decomposable block split, e.g. 2,1");
    gen->add_option("--out", out_path, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (test->parsed()) {
            return cmd_test(input, blocks, kernel, k, interaction, perms, seed, engine, out_path);
        }
        if (verify->parsed()) {
            const std::set<std::string> suites{"all", "psd", "appendix", "inequalities", "kme", "kronecker"};
            if (!suites.count(suite)) throw pdi::cli::usage_error("unknown suite '" + suite + "'");
            return cmd_verify(suite, seed, trials, extended);
        }
        if (gen->parsed()) {
            return cmd_gen(kind, n, N, seed, loading, kind == "decomposable" ? blocks : "", out_path);
        }
    } catch (const pdi::cli::usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const pdi::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    } catch (const pdi::cli::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
