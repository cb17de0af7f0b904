#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "mqg/io.hpp"
#include "mqg/verify.hpp"

using namespace mqg;

namespace {

using P = NCPoly<double>;
using T = NCTensor<double>;

} // namespace

TEST_CASE("doubles round-trip through their text form")
{
    for (double x : {0.0, 1.0, -0.1, 1e-300, 6.02214076e23, 0.068596, std::nextafter(1.0, 2.0)})
        CHECK(std::stod(io::format_double(x)) == x);
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(io::format_double(std::nan("")) == "nan");
}

TEST_CASE("words")
{
    CHECK(io::word_to_text(Word{}) == "1");
    CHECK(io::word_to_text(Word{0, 1, 10}) == "Y1*Y2*Y11");
    CHECK(io::word_from_text(" Y1 * Y2*Y11 ") == Word{0, 1, 10});
    CHECK(io::word_from_text("1") == Word{});
    CHECK_THROWS(io::word_from_text("Y0"));
    CHECK_THROWS(io::word_from_text("X1"));
    CHECK_THROWS(io::word_from_text("Y1**Y2"));
    CHECK_THROWS(io::word_from_text(""));
}

TEST_CASE("polynomials and tensors round-trip exactly")
{
    P p;
    p.add(Word{}, 0.5);
    p.add(Word{0, 1}, -1.0 / 3.0);
    p.add(Word{1, 1, 0}, 1e-17);
    CHECK(io::poly_from_text(io::poly_to_text(p)) == p);
    CHECK(io::poly_from_json(io::poly_to_json(p)) == p);
    CHECK(io::poly_to_text(P::monomial(Word{0}, 2.0)) == "+2.0000000000000000e+00 Y1\n");
    T t;
    t.add(Word{0}, Word{}, 0.25);
    t.add(Word{1, 0}, Word{1}, -7.0 / 9.0);
    CHECK(io::tensor_from_text(io::tensor_to_text(t)) == t);
    CHECK(io::poly_from_text("# comment\n\n+1.5 Y2\n") == P::monomial(Word{1}, 1.5));
    CHECK_THROWS(io::poly_from_text("abc Y1\n"));
    CHECK_THROWS(io::tensor_from_text("1.0 Y1\n"));
    CHECK_THROWS(io::poly_from_json(io::Json::parse(R"({"terms": [{"word": [0], "coeff": 1}]})")));
}

TEST_CASE("matrices")
{
    Mat<double> m(2, 2);
    m << 0.1, -0.2, -0.2, 0.3;
    CHECK(io::matrix_from_text(io::matrix_to_csv(m)) == m);
    CHECK(io::matrix_from_text("0.1 -0.2\n-0.2, 0.3\n") == m);
    CHECK_THROWS(io::matrix_from_text("1 2 3\n4 5 6\n"));
    CHECK_THROWS(io::matrix_from_text(""));
    CHECK(io::matrix_to_json(m).dump() == "[[0.1,-0.2],[-0.2,0.3]]");
}

TEST_CASE("json output is canonical")
{
    io::Json j = io::Json::object();
    j["b"] = 1;
    j["a"] = io::Json::array({0.1, 2.5});
    j["c"] = std::numeric_limits<double>::infinity();
    j["d"] = io::Json::array({io::Json{{"x", true}}});
    const std::string s = io::dump_json(j);
    CHECK(s == "{\n  \"b\": 1,\n  \"a\": [0.10000000000000001, 2.5],\n  \"c\": null,\n  \"d\": [\n    {\n      \"x\": true\n    }\n  ]\n}\n");
    CHECK(io::Json::parse(s)["a"][0].get<double>() == 0.1);
}

TEST_CASE("files")
{
    const auto path = (std::filesystem::temp_directory_path() / "mqg_io_test.txt").string();
    io::write_file(path, "abc\n");
    CHECK(io::read_file(path) == "abc\n");
    std::filesystem::remove(path);
    CHECK_THROWS(io::read_file(path));
}

TEST_CASE("run configuration")
{
    RunConfig c;
    c.apply_config_text("# sample\nn = 3\nq-random = 0.2\nseed = 9\ndepth = 3\ntol.fock.commutation_relation = 1e-11\n");
    CHECK(c.n_generators == 3);
    CHECK(c.q_source == RunConfig::QSource::random);
    CHECK(c.q == 0.2);
    CHECK(c.seed == 9);
    CHECK(c.tolerances.at("fock.commutation_relation") == 1e-11);
    CHECK_NOTHROW(c.validate());
    const auto q1 = c.qspec();
    const auto q2 = c.qspec();
    CHECK(q1.entries() == q2.entries());
    CHECK(q1.q_max() <= 0.2);
    CHECK_THROWS(c.apply_config_text("bogus = 1\n"));
    RunConfig bad;
    bad.depth = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("report bookkeeping")
{
    Report r;
    r.add_bounded("a", 0.5, 1.0);
    r.add_bounded("b", 2.0, 1.0, "too big");
    r.add_skipped("c", "not applicable");
    CHECK(r.at("a").status == CheckStatus::pass);
    CHECK(r.at("b").status == CheckStatus::fail);
    CHECK(r.at("c").status == CheckStatus::skipped);
    CHECK(r.at("a").slack() == 0.5);
    CHECK_FALSE(r.passed());
    CHECK_THROWS_AS(r.add_bounded("a", 0, 1), std::logic_error);
    const auto j = r.to_json();
    CHECK(j["passed"] == false);
    CHECK(j["checks"].size() == 3);
}

TEST_CASE("verification suite on a small configuration")
{
    RunConfig c;
    c.n_generators = 2;
    c.q = 0.001;
    c.depth = 4;
    const Report r = run_verification(c);
    CHECK(r.checks().size() == verification_check_names().size());
    for (std::size_t k = 0; k < r.checks().size(); ++k) {
        CHECK(r.checks()[k].name == verification_check_names()[k]);
        CHECK(r.checks()[k].status == CheckStatus::pass);
    }
    CHECK(r.passed());
    CHECK(io::dump_json(r.to_json()) == io::dump_json(run_verification(c).to_json()));
}
