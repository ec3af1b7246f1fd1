#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "pdi/cli.hpp"

using namespace pdi;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/pdi_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("parse_blocks") {
    auto b = cli::parse_blocks("1,2,3");
    CHECK(b.widths == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(cli::parse_blocks("1,x"), cli::usage_error);
    CHECK_THROWS_AS(cli::parse_blocks("0"), cli::usage_error);
    CHECK_THROWS_AS(cli::parse_blocks(""), cli::usage_error);
}

TEST_CASE("load_csv") {
    TempFile f("ok.csv", "a,b,c\n1,2,3\n4,5,6\n");
    auto d = cli::load_csv(f.path, cli::parse_blocks("1,1,1"));
    CHECK(d.sig.n == 3);
    REQUIRE(d.samples.size() == 2);
    CHECK(d.samples[1].comps[2][0] == 6.0);

    auto wide = cli::load_csv(f.path, cli::parse_blocks("2,1"));
    CHECK(wide.sig.n == 2);
    CHECK(wide.sig.dims == std::vector<int>{2, 1});
    CHECK(wide.samples[0].comps[0].size() == 2);

    CHECK_THROWS_AS(cli::load_csv(f.path, cli::parse_blocks("2,2")), cli::data_error);
    CHECK_THROWS_AS(cli::load_csv("/nonexistent.csv", cli::parse_blocks("1")), cli::data_error);

    TempFile bad("bad.csv", "h1,h2\n1,abc\n");
    CHECK_THROWS_AS(cli::load_csv(bad.path, cli::parse_blocks("1,1")), cli::data_error);
    TempFile inf("inf.csv", "h1\ninf\n");
    CHECK_THROWS_AS(cli::load_csv(inf.path, cli::parse_blocks("1")), cli::data_error);
    TempFile empty("empty.csv", "h1\n");
    CHECK_THROWS_AS(cli::load_csv(empty.path, cli::parse_blocks("1")), cli::data_error);
}

TEST_CASE("parse_gamma") {
    CHECK(cli::parse_gamma("squared_euclidean").kind == ComponentCND::Kind::SquaredEuclidean);
    auto g = cli::parse_gamma("euclidean_power:1.5");
    CHECK(g.beta == 1.5);
    CHECK_THROWS_AS(cli::parse_gamma("bogus"), cli::usage_error);
}

TEST_CASE("kernel_from_file sum_form") {
    TempFile f("k1.txt",
               "# order-2 sum form\n"
               "kind = sum_form\n"
               "ell = 2\n"
               "psi = power\n"
               "a = 1.5\n");
    auto spec = cli::kernel_from_file(f.path, scalar_signature(3));
    CHECK(spec.kind == PDIKernelSpec::Kind::SumForm);
    CHECK(spec.order == 2);
    CHECK(spec.sig.n == 3);
}

TEST_CASE("kernel_from_file bernstein") {
    TempFile f("k2.txt",
               "kind = bernstein\n"
               "atoms = 1 1 : 1.0 ; 0.5 0.5 : 0.5\n");
    auto spec = cli::kernel_from_file(f.path, scalar_signature(2));
    CHECK(spec.kind == PDIKernelSpec::Kind::Bernstein);
    CHECK(spec.order == 2);
    TempFile bad("k3.txt", "kind = bernstein\natoms = 1 : 1.0\n");
    CHECK_THROWS(cli::kernel_from_file(bad.path, scalar_signature(2)));
}

TEST_CASE("resolve_kernel presets") {
    CHECK(cli::resolve_kernel("preset:dcov", scalar_signature(3)).name == "dcov");
    CHECK(cli::resolve_kernel("preset:dhsic-gauss", scalar_signature(2)).order == 2);
    auto lp = cli::resolve_kernel("preset:lancaster-pow:2.5", scalar_signature(3));
    CHECK(lp.order == 3);
    auto ba = cli::resolve_kernel("preset:bernstein-atom:1", scalar_signature(2));
    CHECK(ba.kind == PDIKernelSpec::Kind::Bernstein);
    CHECK_THROWS_AS(cli::resolve_kernel("preset:nope", scalar_signature(2)), cli::usage_error);
}

TEST_CASE("report_json fields") {
    TestReport rep;
    rep.statistic = 0.5;
    rep.p_value = 0.1;
    rep.N = 10;
    rep.n = 2;
    rep.k = 2;
    rep.B = 99;
    rep.seed = 7;
    rep.engine = "fast";
    rep.kernel_name = "dcov";
    rep.interaction = "lancaster";
    rep.null_model = "full-independence";
    rep.elapsed_ms = 1.5;
    auto j = cli::report_json(rep);
    CHECK(j["schema_version"] == 1);
    CHECK(j["statistic"] == 0.5);
    CHECK(j["p_value"] == 0.1);
    CHECK(j["kernel"] == "dcov");
    CHECK(j.contains("elapsed_ms"));
    rep.p_value.reset();
    CHECK_FALSE(cli::report_json(rep).contains("p_value"));
}

TEST_CASE("fmt17 round trip") {
    const double v = 0.1 + 0.2;
    CHECK(std::stod(cli::fmt17(v)) == v);
}
