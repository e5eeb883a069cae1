#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(SQUEEZELAB_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& name) { return std::string(SQUEEZELAB_TEST_DATA) + "/" + name; }

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("ssi-eval reports") {
    auto dicke = run("ssi-eval --json " + data("dicke20.txt"));
    REQUIRE(dicke.code == 0);
    const auto d = nlohmann::json::parse(dicke.out);
    CHECK(d["xi_G"]["value"].get<double>() == doctest::Approx(9.0 / 19).epsilon(1e-12));
    CHECK(d["depth"]["depth"].get<int>() == 20);

    const auto c = nlohmann::json::parse(run("ssi-eval --json " + data("css10.txt")).out);
    CHECK(c["xi_G"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c["depth"]["depth"].get<int>() == 1);
    int defined = 0;
    for (const auto& [name, v] : c["fixed_frame"]["parameters"].items()) {
        if (!v.is_number()) continue;
        CHECK(v.get<double>() == doctest::Approx(1.0).epsilon(1e-12));
        ++defined;
    }
    CHECK(defined >= 4);

    const auto s = nlohmann::json::parse(run("ssi-eval --json " + data("singlet4.txt")).out);
    CHECK(std::abs(s["xi_G"]["value"].get<double>()) < 1e-12);

    const auto text = run("ssi-eval " + data("dicke20.txt"));
    CHECK(text.code == 0);
    CHECK(text.out.find("entanglement depth >= 20") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run("ssi-eval " + data("malformed.txt")).code == 2);
    CHECK(run("ssi-eval " + data("missing.txt")).code == 2);
    CHECK(run("").code == 2);
    CHECK(run("no-such-command").code == 2);
    CHECK(run("lg-kn --coupling-g -1").code == 2);
    CHECK(run("lg-kn --n-list 3,40").code == 2);
    CHECK(run("fcurve --J 0.7").code == 2);
    CHECK(run("fcurve --J 500").code == 2);
    CHECK(run("depth --var-x 1 --sum-perp 100 --N 20 --j 1 --criterion duan").code == 1);
    CHECK(run("depth --var-x 0 --sum-perp 0 --N 20 --criterion improved").code == 1);
    CHECK(run("depth --var-x 0 --sum-perp 110 --N 20 --criterion bogus").code == 2);
    CHECK(run("gauss-dump --sequence " + data("missing.seq")).code == 2);
    CHECK(run("--help").code == 0);
}

TEST_CASE("depth subcommand") {
    const auto r = run("depth --var-x 0 --mean-z 0 --sum-perp 110 --N 20 --criterion all");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["improved"].get<int>() == 20);
    CHECK(j["duan"].get<int>() == 20);
    CHECK(j["sorensen_molmer"].get<int>() == 1);
}

TEST_CASE("fcurve table") {
    const auto r = run("fcurve --J 0.5");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        double x, f;
        std::istringstream ls(line);
        ls >> x >> f;
        CHECK(f == doctest::Approx(x * x / 2).epsilon(1e-9));
        ++rows;
    }
    CHECK(rows >= 2);
}

TEST_CASE("csv output is reproducible") {
    const std::string args = "lg-kn --config " + data("lg_small.cfg");
    const auto a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("# config_hash=", 0) == 0);
    std::istringstream in(a.out);
    std::string hash, header, row;
    std::getline(in, hash);
    std::getline(in, header);
    CHECK(header == "theta,K3,K7");
    int rows = 0;
    while (std::getline(in, row)) ++rows;
    CHECK(rows == 2);

    // flags override config entries and change the hash
    const auto c = run(args + " --n-list 3,5");
    CHECK(c.out.substr(0, c.out.find('\n')) != hash);

    const std::string path = "cli_test_out.csv";
    std::remove(path.c_str());
    REQUIRE(run(args + " --output " + path).code == 0);
    // the output path is part of the config, so only the hash line differs
    const std::string written = read_file(path);
    CHECK(written.substr(written.find('\n')) == a.out.substr(a.out.find('\n')));
    std::remove(path.c_str());
}

TEST_CASE("protocol tables") {
    const auto ki = run("lg-ki --theta 1.5707963267948966");
    REQUIRE(ki.code == 0);
    CHECK(ki.out.find("n_atoms,n_photons,theta,K3,KI3,I_35,I_37,I_57") != std::string::npos);

    const auto inv = run("lg-invasivity --theta 0:3:4 --n-photons-grid 1e8,5e8");
    REQUIRE(inv.code == 0);
    std::istringstream in(inv.out);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        // I_35 column
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        REQUIRE(cells.size() == 6);
        CHECK(std::stod(cells[3]) == 0.0);
        ++rows;
    }
    CHECK(rows == 8);

    const auto off = run("lg-kn --backaction off --scattering off --theta 0:6.2:32");
    REQUIRE(off.code == 0);
    std::istringstream oin(off.out);
    std::getline(oin, line);
    std::getline(oin, line);
    while (std::getline(oin, line)) {
        std::stringstream ls(line);
        std::string c;
        std::getline(ls, c, ',');
        while (std::getline(ls, c, ',')) CHECK(std::stod(c) >= -1e-9);
    }
}

TEST_CASE("qnd-fom and gauss-dump") {
    const auto f = run("qnd-fom");
    REQUIRE(f.code == 0);
    const auto j = nlohmann::json::parse(f.out);
    CHECK(j["defined"].get<bool>());
    CHECK(j["product_M_S"].get<double>() < 1);
    CHECK(j["conditional_squeezing"].get<double>() == doctest::Approx(1.0 / 6).epsilon(1e-12));

    const auto g = run("gauss-dump --sequence " + data("three_pulses.seq") + " --project");
    REQUIRE(g.code == 0);
    std::istringstream in(g.out);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "Jx,Jy,Jz,Sx1,Sy1,Sz1,Sx2,Sy2,Sz2,Sx3,Sy3,Sz3");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 12);
}
