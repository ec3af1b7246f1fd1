#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "pdi/combinat.hpp"

using namespace pdi;

TEST_CASE("bell numbers") {
    CHECK(bell(0) == 1);
    CHECK(bell(3) == 5);
    CHECK(bell(4) == 15);
    CHECK(bell(12) == 4213597ULL);
    CHECK_THROWS_AS(bell(13), std::out_of_range);
    CHECK_THROWS_AS(bell(-1), std::out_of_range);
}

TEST_CASE("enumerate_partitions basics") {
    auto p1 = enumerate_partitions(1);
    REQUIRE(p1.size() == 1);
    CHECK(p1[0].blocks.size() == 1);
    CHECK(p1[0].blocks[0].members == std::vector<int>{1});

    auto p2 = enumerate_partitions(2);
    REQUIRE(p2.size() == 2);
    // RGS order: 00 (one block) before 01 (two blocks)
    CHECK(p2[0].blocks.size() == 1);
    CHECK(p2[1].blocks.size() == 2);
    CHECK(p2[1].blocks[0].members == std::vector<int>{1});
    CHECK(p2[1].blocks[1].members == std::vector<int>{2});

    CHECK(enumerate_partitions(4).size() == bell(4));
    CHECK_THROWS_AS(enumerate_partitions(9), std::out_of_range);
}

TEST_CASE("enumerate_partitions yields set partitions") {
    for (int n = 1; n <= 6; ++n) {
        auto parts = enumerate_partitions(n);
        CHECK(parts.size() == bell(n));
        for (const auto& pi : parts) {
            std::vector<int> seen(static_cast<std::size_t>(n), 0);
            for (const auto& blk : pi.blocks) {
                CHECK(!blk.members.empty());
                for (int v : blk.members) {
                    REQUIRE(v >= 1);
                    REQUIRE(v <= n);
                    ++seen[static_cast<std::size_t>(v - 1)];
                }
            }
            for (int c : seen) CHECK(c == 1);
        }
    }
}

TEST_CASE("streitberg_coefficient") {
    auto coeff_for_blocks = [](int m) {
        Partition pi;
        pi.n = m;
        for (int i = 1; i <= m; ++i) pi.blocks.push_back(SubsetIndex{m, {i}});
        return streitberg_coefficient(pi);
    };
    CHECK(coeff_for_blocks(1) == 1);
    CHECK(coeff_for_blocks(2) == -1);
    CHECK(coeff_for_blocks(4) == -6);
}

TEST_CASE("elem_sym values") {
    Eigen::Vector3d r(1, 2, 3);
    CHECK(elem_sym(2, r) == doctest::Approx(11.0).epsilon(1e-14));
    CHECK(elem_sym(0, r) == 1.0);
    for (int n = 1; n <= 8; ++n) {
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        for (int k = 0; k <= n; ++k) {
            CHECK(elem_sym(k, ones) == doctest::Approx(double(binomial(n, k))).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(elem_sym(4, r), std::out_of_range);
}

TEST_CASE("elem_sym generating function") {
    CounterRng rng(7, 1);
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + int(rng.below(6));
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = rng.uniform(-2, 2);
        const double lam = rng.uniform(-2, 2);
        auto p = elem_sym_all(n, r);
        double lhs = 0, rhs = 1;
        for (int k = 0; k <= n; ++k) lhs += std::pow(lam, n - k) * p[std::size_t(k)];
        for (int i = 0; i < n; ++i) rhs *= lam + r[i];
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1 + std::abs(rhs)));
    }
}

TEST_CASE("h_poly values") {
    Eigen::Vector3d zero = Eigen::Vector3d::Zero();
    CHECK(h_poly(2, 3, zero) == doctest::Approx(2.0));
    CounterRng rng(11, 2);
    for (int n = 1; n <= 6; ++n) {
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        for (int k = 1; k <= n; ++k) {
            CHECK(std::abs(h_poly(k, n, ones)) < 1e-12);
        }
        // k = n: H equals the generating function at lambda = -1, i.e. prod(r_i - 1)
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = rng.uniform(0, 3);
        double prod = 1;
        for (int i = 0; i < n; ++i) prod *= r[i] - 1.0;
        CHECK(h_poly(n, n, r) == doctest::Approx(prod).epsilon(1e-11));
    }
}

TEST_CASE("e_func values") {
    Eigen::Vector2d s2(std::log(2.0), std::log(2.0));
    CHECK(e_func(2, 2, s2) == doctest::Approx(0.25).epsilon(1e-14));
    Eigen::Vector3d z = Eigen::Vector3d::Zero();
    CHECK(std::abs(e_func(2, 3, z)) < 1e-12);
    for (double s1 : {0.0, 0.5, 3.0}) {
        Eigen::Vector3d s(s1, 0, 0);
        CHECK(std::abs(e_func(2, 3, s)) < 1e-12);
    }
    Eigen::Vector2d neg(-1, 0);
    CHECK_THROWS_AS(e_func(1, 2, neg), std::domain_error);
}

TEST_CASE("e_func sign: (-1)^k E >= 0") {
    CounterRng rng(3, 3);
    for (int t = 0; t < 200; ++t) {
        const int n = 1 + int(rng.below(5));
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) s[i] = rng.uniform(0, 5);
        for (int k = 0; k <= n; ++k) {
            const double v = ((k % 2 == 0) ? 1.0 : -1.0) * e_func(k, n, s);
            CHECK(v >= -1e-12);
        }
    }
}

TEST_CASE("in_boundary") {
    CHECK(in_boundary(Eigen::Vector3d(0, 0, 1), 2));
    CHECK_FALSE(in_boundary(Eigen::Vector3d(1, 1, 1), 2));
    CHECK(in_boundary(Eigen::Vector2d::Zero().eval(), 1));
}

TEST_CASE("subsets and complement") {
    auto s = subsets_of_size(4, 2);
    CHECK(s.size() == 6);
    CHECK(s[0].members == std::vector<int>{1, 2});
    CHECK(s[5].members == std::vector<int>{3, 4});
    auto c = complement(s[0]);
    CHECK(c.members == std::vector<int>{3, 4});
    CHECK(complement(SubsetIndex{3, {}}).members == std::vector<int>{1, 2, 3});
}

TEST_CASE("binomial") {
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(60, 30) == 118264581564861424ULL);
}
