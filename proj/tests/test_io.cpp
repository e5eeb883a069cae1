#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "squeezelab/io.hpp"
#include "squeezelab/states.hpp"
#include "test_util.hpp"

using namespace sqz;

namespace {

const char* kDickeFile = R"(# Dicke N=4
N = 4
j = 0.5
Jx = 0
Jy = 0
Jz = 0
Cxx = 3
Cxy = 0
Cxz = 0
Cyy = 3
Cyz = 0
Czz = 0
Qxx = 0.25
Qxy = 0
Qxz = 0
Qyy = 0.25
Qyz = 0
Qzz = 0.25
)";

int parse_error_line(const std::string& text) {
    std::istringstream in(text);
    try {
        io::read_moments(in, "m.txt");
    } catch (const io::ParseError& e) {
        CHECK(std::string(e.what()).rfind("m.txt:", 0) == 0);
        return e.line();
    }
    return -1;
}

std::string replace_line(std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    return text;
}

}  // namespace

TEST_CASE("moment file round trip") {
    std::istringstream in(kDickeFile);
    const auto md = io::read_moments(in);
    CHECK(md.n == 4);
    CHECK(md.C(0, 0) == 3);
    CHECK(md.local(2) == doctest::Approx(1.0));

    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto css = css_moments(7 + t, t % 2 ? 1.0 : 0.5, testutil::random_unit(rng));
        std::stringstream ss;
        io::write_moments(ss, css);
        const auto back = io::read_moments(ss);
        CHECK(back.n == css.n);
        CHECK(back.j == css.j);
        CHECK((back.mean - css.mean).cwiseAbs().maxCoeff() == 0.0);
        // the file stores the upper triangle
        const Mat3 dC = back.C.triangularView<Eigen::Upper>().toDenseMatrix() - css.C.triangularView<Eigen::Upper>().toDenseMatrix();
        const Mat3 dQ = back.Q.triangularView<Eigen::Upper>().toDenseMatrix() - css.Q.triangularView<Eigen::Upper>().toDenseMatrix();
        CHECK(dC.cwiseAbs().maxCoeff() == 0.0);
        CHECK(dQ.cwiseAbs().maxCoeff() == 0.0);
        CHECK(back.C == back.C.transpose());
        CHECK((back.local - css.local).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("moment file errors carry line numbers") {
    const std::string base = kDickeFile;
    CHECK(parse_error_line(replace_line(base, "Cyy = 3", "Cyy = three")) == 10);
    CHECK(parse_error_line(replace_line(base, "Cyy = 3", "Cyy 3 4")) == 10);
    CHECK(parse_error_line(base + "Cyx = 0.5\n") == 19);
    CHECK(parse_error_line(base + "Cxx = 3\n") == 19);
    CHECK(parse_error_line(base + "foo = 1\n") == 19);
    CHECK(parse_error_line(replace_line(base, "Qzz = 0.25\n", "")) > 0);
    // invariant violations surface as parse errors too
    CHECK(parse_error_line(replace_line(base, "Cxx = 3", "Cxx = -3")) > 0);
    CHECK(parse_error_line(replace_line(base, "j = 0.5", "j = 0.7")) > 0);

    std::istringstream ok(base + "Cyx = 0\n");
    CHECK_NOTHROW(io::read_moments(ok));
    CHECK_THROWS_AS(io::read_moments_file("/nonexistent/moments.txt"), io::ParseError);
}

TEST_CASE("curve table round trip") {
    FCurve c;
    c.J = 1.5;
    c.envelope_gap = 3e-9;
    c.sample_x = {0.0, 0.4, 1.0};
    c.x = {0.0, 0.4, 1.0};
    c.f = {0.5, 0.11, 0.0};
    std::stringstream ss;
    io::write_fcurve(ss, c);
    const auto back = io::read_fcurve(ss);
    CHECK(back.J == 1.5);
    CHECK(back.envelope_gap == 3e-9);
    CHECK(back.x == c.x);
    CHECK(back.f == c.f);

    std::istringstream no_j("0 0.5\n1 0\n");
    CHECK_THROWS_AS(io::read_fcurve(no_j), io::ParseError);
    std::istringstream back_x("# J 1\n0.5 0.1\n0.2 0.3\n");
    try {
        io::read_fcurve(back_x);
        FAIL("expected a parse error");
    } catch (const io::ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("sequence file") {
    std::istringstream in("# three pulses\nmeas 1\nrot 0.5\nmeas 2 skip  # extra\nrot 0.25\nmeas 3 record\n");
    const auto s = io::read_sequence(in);
    REQUIRE(s.steps.size() == 5);
    CHECK(s.n_measurements() == 3);
    CHECK_FALSE(s.steps[2].recorded);
    CHECK(s.steps[4].label == 3);
    CHECK(s.steps[3].theta == 0.25);

    auto line_of = [](const std::string& text) {
        std::istringstream is(text);
        try {
            io::read_sequence(is);
        } catch (const io::ParseError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("meas 1\nspin 2\n") == 2);
    CHECK(line_of("meas 1\nmeas 1.5\n") == 2);
    CHECK(line_of("meas 1\nrot\n") == 2);
    CHECK(line_of("meas 1 maybe\n") == 1);
    CHECK(line_of("meas 1\nmeas 3\n") > 0);
}

TEST_CASE("config") {
    std::istringstream in("# run\nn_atoms = 2e6\ntheta = 0:1:5\nn_list=3,5, 7\nbackaction = off\nname = lg run\n");
    const auto c = io::Config::parse(in);
    CHECK(c.get_double("n_atoms", 0) == 2e6);
    CHECK(c.get_list("theta", {}) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK(c.get_list("n_list", {}) == std::vector<double>{3, 5, 7});
    CHECK_FALSE(c.get_bool("backaction", true));
    CHECK(c.get("name", "") == "lg run");
    CHECK(c.get_int("missing", 4) == 4);
    CHECK_THROWS_AS(c.get_int("n_list", 0), std::invalid_argument);
    CHECK_THROWS_AS(c.get_bool("name", true), std::invalid_argument);

    auto d = c;
    CHECK(d.hash() == c.hash());
    CHECK(d.hash().size() == 16);
    d.set("n_atoms", "2e6 ");
    CHECK(d.hash() != c.hash());

    std::istringstream ordered("a=1\nb=2\n"), swapped("b=2\na=1\n");
    CHECK(io::Config::parse(ordered).hash() == io::Config::parse(swapped).hash());

    std::istringstream dup("a=1\n\na=2\n");
    try {
        io::Config::parse(dup);
        FAIL("expected a parse error");
    } catch (const io::ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream bad_range("t = 0:1\n");
    CHECK_THROWS_AS(io::Config::parse(bad_range).get_list("t", {}), std::invalid_argument);
}

TEST_CASE("csv output") {
    std::ostringstream out;
    io::CsvWriter w(out, {"theta", "K_3"}, "00ff");
    w.row({0.5, -0.1});
    CHECK(out.str().rfind("# config_hash=00ff\ntheta,K_3\n", 0) == 0);
    CHECK_THROWS_AS(w.row({1.0}), std::invalid_argument);

    for (double v : {0.1, 1.0 / 3, -2.5e-17, 6.02214076e23, 0.0}) CHECK(std::stod(io::format_double(v)) == v);
}
