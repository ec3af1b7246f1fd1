#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "pdi/kernels.hpp"
#include "pdi/stats.hpp"

using namespace pdi;

namespace {

ProductPoint scalar_point(std::initializer_list<double> vals) {
    ProductPoint p;
    for (double v : vals) p.comps.push_back(Eigen::VectorXd::Constant(1, v));
    return p;
}

}  // namespace

TEST_CASE("cnd_eval") {
    auto g1 = ComponentCND::euclidean_power(1.0);
    CHECK(cnd_eval(g1, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 3.0)) == doctest::Approx(3.0));
    auto g2 = ComponentCND::squared_euclidean();
    CHECK(cnd_eval(g2, Eigen::VectorXd::Zero(2), Eigen::Vector2d(1, 2).eval()) == doctest::Approx(5.0));
    CHECK_THROWS_AS(ComponentCND::euclidean_power(2.5), std::invalid_argument);
    CHECK_THROWS_AS(ComponentCND::euclidean_power(0.0), std::invalid_argument);
}

TEST_CASE("euclidean powers are CND: centered quadratic form <= 0") {
    CounterRng rng(41, 1);
    for (double beta : {0.5, 1.0, 2.0}) {
        auto g = beta == 2.0 ? ComponentCND::squared_euclidean() : ComponentCND::euclidean_power(beta);
        const int m = 8;
        std::vector<Eigen::VectorXd> pts;
        for (int i = 0; i < m; ++i) pts.push_back(Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        Eigen::VectorXd c(m);
        for (int i = 0; i < m; ++i) c[i] = rng.uniform(-1, 1);
        c.array() -= c.mean();  // zero-mass coefficients
        double q = 0;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) q += c[i] * c[j] * cnd_eval(g, pts[std::size_t(i)], pts[std::size_t(j)]);
        }
        CHECK(q <= 1e-10);
    }
}

TEST_CASE("K^gamma gram is PSD") {
    CounterRng rng(43, 2);
    auto g = ComponentCND::euclidean_power(1.0);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(1);
    const int m = 9;
    Eigen::MatrixXd G(m, m);
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < m; ++i) pts.push_back(Eigen::VectorXd::Constant(1, rng.uniform(-2, 2)));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) G(i, j) = kgamma_eval(g, w, pts[std::size_t(i)], pts[std::size_t(j)]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()));
}

TEST_CASE("gram registry kernel") {
    Eigen::MatrixXd v(2, 2);
    v << 0, 1, 1, 0;
    std::vector<Eigen::VectorXd> reg{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)};
    auto g = ComponentCND::from_gram(v, reg);
    CHECK(cnd_eval(g, reg[0], reg[1]) == 1.0);
    CHECK(g.zero_diagonal());
    CHECK_THROWS_AS(cnd_eval(g, Eigen::VectorXd::Constant(1, 2.0), reg[0]), std::invalid_argument);
    Eigen::MatrixXd asym(2, 2);
    asym << 0, 1, 2, 0;
    CHECK_THROWS_AS(ComponentCND::from_gram(asym, reg), std::invalid_argument);
}

TEST_CASE("omega_ell and e_ell") {
    CHECK(omega_ell(1, 0.7) == 1.0);
    CHECK(omega_ell(3, 2.0) == doctest::Approx(1.0 - 2.0 + 2.0));
    CHECK(e_ell(1, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(e_ell(2, 1.0) == doctest::Approx(std::exp(-1.0) - (1.0 - 1.0)).epsilon(1e-12));
    CHECK(e_ell(3, 0.0) == 0.0);
    // small-s series path agrees with the direct formula at the crossover
    for (int ell = 1; ell <= 4; ++ell) {
        for (double s : {0.49, 0.499999, 0.5, 0.51}) {
            const double direct = ((ell % 2 == 0) ? 1.0 : -1.0) * (std::exp(-s) - omega_ell(ell, s));
            CHECK(e_ell(ell, s) == doctest::Approx(direct).epsilon(1e-9));
        }
    }
}

TEST_CASE("cm_eval_psi") {
    auto p = CMFunctionSpec::power(1.5, 2);
    CHECK(cm_eval_psi(p, 4.0) == doctest::Approx(8.0));
    CHECK_THROWS_AS(CMFunctionSpec::power(2.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(cm_eval_psi(p, -1.0), std::domain_error);
    auto lp = CMFunctionSpec::log_power(2);
    CHECK(cm_eval_psi(lp, 0.0) == 0.0);
    CHECK(cm_eval_psi(lp, std::exp(1.0)) == doctest::Approx(std::exp(1.0)));
    auto ex = CMFunctionSpec::exponential(2.0, 1);
    CHECK(cm_eval_psi(ex, 1.0) == doctest::Approx(std::exp(-2.0)));
    auto mixture = CMFunctionSpec::mixture(0.0, {{1.0, 1.0}}, 1);
    // single atom r=1, ell=1: psi(t) = (e^{-t} - 1) * 2
    CHECK(cm_eval_psi(mixture, 1.0) == doctest::Approx(-2.0 * (1.0 - std::exp(-1.0))));
    CHECK(mixture.is_polynomial() == false);
    CHECK(CMFunctionSpec::mixture(1.0, {}, 2).is_polynomial());
    CHECK_THROWS_AS(CMFunctionSpec::mixture(-1.0, {}, 2), std::invalid_argument);
}

TEST_CASE("bernstein order n evaluation") {
    // single atom r = ones: per factor (1-e^{-t_i}) * 2
    auto g = BernsteinSpecK::order_n(2, {{Eigen::Vector2d::Ones(), 1.0}});
    const double v = bernstein_eval_g(g, Eigen::Vector2d::Ones());
    CHECK(v == doctest::Approx(4.0 * std::pow(1.0 - std::exp(-1.0), 2)));
    CHECK(v == doctest::Approx(1.5983).epsilon(1e-4));
    // r = 0 atoms give the plain product of coordinates
    auto lin = BernsteinSpecK::order_n(2, {{Eigen::Vector2d::Zero(), 1.0}});
    CHECK(bernstein_eval_g(lin, Eigen::Vector2d(2.0, 3.0)) == doctest::Approx(6.0));
    CHECK_THROWS_AS(bernstein_eval_g(g, Eigen::Vector2d(-1.0, 0.0).eval()), std::domain_error);
}

TEST_CASE("bernstein order k < n vanishes on the boundary") {
    auto g = BernsteinSpecK::order_k(
        3, 2, {{Eigen::Vector3d::Ones(), 1.0}, {Eigen::Vector3d::Constant(0.5), 0.5}});
    for (double t1 : {0.0, 1.0, 4.0}) {
        Eigen::Vector3d t(t1, 0, 0);  // fewer than 2 positive entries
        CHECK(std::abs(bernstein_eval_g(g, t)) < 1e-12);
    }
    CHECK(bernstein_eval_g(g, Eigen::Vector3d(1, 1, 0)) > 0);
    // atoms with too few positive entries are rejected
    CHECK_THROWS_AS(BernsteinSpecK::order_k(3, 2, {{Eigen::Vector3d(1, 1, 0), 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("pdi_eval examples") {
    // g(t) = t1 t2 with squared euclidean components
    auto spec = PDIKernelSpec::bernstein(
        scalar_signature(2), BernsteinSpecK::order_n(2, {{Eigen::Vector2d::Zero(), 1.0}}),
        {ComponentCND::squared_euclidean(), ComponentCND::squared_euclidean()});
    CHECK(pdi_eval(spec, scalar_point({0, 0}), scalar_point({1, 2})) == doctest::Approx(4.0));

    // sum form, ell = 2, psi = power(1.5): (1+1+2)^1.5 = 8
    auto sf = PDIKernelSpec::sum_form(scalar_signature(3), CMFunctionSpec::power(1.5, 2),
                                      default_gammas(3));
    CHECK(pdi_eval(sf, scalar_point({0, 0, 0}), scalar_point({1, 1, 2})) == doctest::Approx(8.0));
    CHECK(sf.order == 2);
}

TEST_CASE("kronecker order bookkeeping and evaluation") {
    auto k1 = PDIKernelSpec::sum_form(scalar_signature(1), CMFunctionSpec::power(1.0, 1),
                                      default_gammas(1));
    auto k2 = PDIKernelSpec::sum_form(scalar_signature(2), CMFunctionSpec::power(1.5, 2),
                                      default_gammas(2));
    auto kron = PDIKernelSpec::kronecker({k1, k2});
    CHECK(kron.order == 3);
    CHECK(kron.sig.n == 3);
    const double v = pdi_eval(kron, scalar_point({0, 0, 0}), scalar_point({2, 1, 1}));
    CHECK(v == doctest::Approx(2.0 * std::pow(2.0, 1.5)));
}

TEST_CASE("induced PD kernel properties") {
    CounterRng rng(47, 3);
    const SpaceSignature sig = scalar_signature(2);
    auto spec = dcov_kernel(sig);
    const int k = 2;
    ProductPoint x0 = scalar_point({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    // symmetry
    for (int t = 0; t < 20; ++t) {
        ProductPoint a = scalar_point({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        ProductPoint b = scalar_point({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const double ab = induced_pd_eval(spec, k, x0, a, b);
        const double ba = induced_pd_eval(spec, k, x0, b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
    }
    // k = n, kernel zero on the extended diagonal: K(x,x) = 2^n I(x, x0)
    ProductPoint x = scalar_point({0.3, -0.7});
    const double kk = induced_pd_eval(spec, k, x0, x, x);
    CHECK(kk == doctest::Approx(4.0 * pdi_eval(spec, x, x0)).epsilon(1e-10));
    // PSD gram over random points
    std::vector<ProductPoint> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(scalar_point({rng.uniform(-1, 1), rng.uniform(-1, 1)}));
    Eigen::MatrixXd G = gram(
        [&](const ProductPoint& a, const ProductPoint& b) { return induced_pd_eval(spec, k, x0, a, b); },
        pts);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * std::max(1.0, es.eigenvalues().maxCoeff()));
}

TEST_CASE("gram helper") {
    auto spec = dcov_kernel(scalar_signature(2));
    auto kfun = [&](const ProductPoint& a, const ProductPoint& b) { return pdi_eval(spec, a, b); };
    Eigen::MatrixXd g1 = gram(kfun, {scalar_point({0, 0})});
    CHECK(g1(0, 0) == 0.0);
    Eigen::MatrixXd g2 = gram(kfun, {scalar_point({0, 0}), scalar_point({1, 1})});
    CHECK(g2.rows() == 2);
    CHECK(g2(0, 1) == g2(1, 0));
}
