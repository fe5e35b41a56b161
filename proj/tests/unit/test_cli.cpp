#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "../oracles/reference_values.hpp"
#include "ptdirac/cli.hpp"
#include "ptdirac/quadrature.hpp"

using namespace ptdirac;
namespace fs = std::filesystem;

namespace {

const std::string configs = std::string(PTDIRAC_SOURCE_DIR) + "/configs/";

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "ptdirac");
    std::ostringstream o, e;
    const int c = cli::run(args, o, e);
    return {c, o.str(), e.str()};
}

fs::path scratch()
{
    static int k = 0;
    auto p = fs::temp_directory_path() / ("ptdirac_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(k++));
    fs::create_directories(p);
    return p;
}

std::string write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("key-value parsing")
{
    const auto kv = cli::parse_key_values("# c\nfamily = oscillator  # tail\n\n osc.m1=0.5\n");
    CHECK(kv.size() == 2);
    CHECK(kv.at("osc.m1") == "0.5");
    CHECK_THROWS_AS(cli::parse_key_values("a = 1\na = 2\n"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_key_values("just words\n"), cli::ConfigError);
    CHECK_THROWS_AS(cli::make_config({{"family", "oscillator"}, {"osc.omega", "1"}}), cli::ConfigError);
    CHECK_THROWS_AS(cli::make_config({{"family", "oscillator"}, {"osc.m1", "x"}}), cli::ConfigError);
}

TEST_CASE("overrides")
{
    const auto c = cli::make_config({{"family", "oscillator"}}, {201, 7.0, 1e-5});
    CHECK(c.grid.n == 201);
    CHECK(c.grid.x_max == doctest::Approx(7.0));
    CHECK(c.tol == doctest::Approx(1e-5));
}

TEST_CASE("oscillator spectrum with both oracles")
{
    const auto r = run({"spectrum", "--config", configs + "oscillator.cfg", "--verify"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    bool seen = false;
    for (const auto& c : j["comparisons"]) {
        if (c["n"] == 0 && c["branch"] == 1) {
            seen = true;
            CHECK(std::abs(c["closed_form"].get<double>() - ref::osc_e0) < 1e-14);
            CHECK(c["shooting"]["abs_diff"].get<double>() < 1e-6);
            CHECK(c["dirac"]["abs_diff"].get<double>() < 1e-4);
        }
        CHECK(c["pass"] == true);
    }
    CHECK(seen);
}

TEST_CASE("quadratic spectrum flags the spurious root")
{
    const auto r = run({"spectrum", "--config", configs + "quadratic.cfg"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    bool seen = false;
    for (const auto& s : j["states"])
        if (std::abs(s["E"].get<double>() - ref::quad_e_minus) < 1e-10) {
            seen = true;
            CHECK(s["valid"] == false);
            CHECK(s["note"] == "unsquared-equation residual");
        }
    CHECK(seen);
}

TEST_CASE("input errors exit 2")
{
    const auto d = scratch();
    auto bad_mu = write(d / "rm.cfg", "family = rosen_morse\nrm.P1 = 1\nrm.mu = 0\n");
    auto r = run({"spectrum", "--config", bad_mu});
    CHECK(r.code == 2);
    CHECK(r.err.find("parameter error") != std::string::npos);

    auto window = write(d / "w.cfg", "family = rosen_morse\nwindow.lo = 1\nwindow.hi = 0\n");
    CHECK(run({"spectrum", "--config", window}).code == 2);

    auto no_n = write(d / "s.cfg", "family = oscillator\nosc.m1 = 0.5\n");
    r = run({"spinor", "--config", no_n});
    CHECK(r.code == 2);
    CHECK(r.err.find("'n'") != std::string::npos);

    CHECK(run({"spectrum", "--config", (d / "missing.cfg").string()}).code == 2);
    CHECK(run({"nosuch", "--config", no_n}).code == 2);
    CHECK(run({"spectrum", "--config", no_n, "--format", "xml"}).code == 2);
    fs::remove_all(d);
}

TEST_CASE("spinor table integrates to one")
{
    const auto d = scratch();
    const auto cfg = write(d / "o.cfg", slurp(configs + "oscillator.cfg") + "n = 0\n");
    const auto out = (d / "spinor.csv").string();
    REQUIRE(run({"spinor", "--config", cfg, "--format", "csv", "--out", out}).code == 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# ptdirac spinor", 0) == 0);
    std::getline(in, line);
    CHECK(line == "x,re_psi_plus,im_psi_plus,re_psi_minus,im_psi_minus,abs2_total");
    std::vector<double> x, a;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> f;
        while (std::getline(ss, cell, ','))
            f.push_back(std::stod(cell));
        REQUIRE(f.size() == 6);
        x.push_back(f[0]);
        a.push_back(f[5]);
    }
    REQUIRE(x.size() == 4001);
    CHECK(std::abs(quad::simpson(a, x[1] - x[0]) - 1.0) < 1e-6);
    // atomic write leaves nothing behind
    int files = 0;
    for (const auto& e : fs::directory_iterator(d))
        files += e.path().filename().string().find(".tmp.") != std::string::npos;
    CHECK(files == 0);
    fs::remove_all(d);
}

TEST_CASE("outputs are byte-for-byte deterministic")
{
    const auto a = run({"spectrum", "--config", configs + "rosen_morse.cfg", "--grid-n", "801"});
    const auto b = run({"spectrum", "--config", configs + "rosen_morse.cfg", "--grid-n", "801"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto c = run({"spectrum", "--config", configs + "rosen_morse.cfg", "--format", "csv"});
    CHECK(c.out.rfind("# ptdirac spectrum family=rosen_morse", 0) == 0);
}

TEST_CASE("PT-violating samples: ptcheck and verify exit 1")
{
    const auto d = scratch();
    std::string rows = "x,re_M,im_M,re_P,im_P,re_V,im_V\n";
    for (int i = 0; i <= 200; ++i) {
        const double x = -8.0 + 0.08 * i;
        char buf[200];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,0,0,0,0,%.17g\n", x, 1.0 + 2.0 / std::cosh(x), 0.3 / std::cosh(x));
        rows += buf;
    }
    write(d / "bad.csv", rows);
    const auto cfg = write(d / "bad.cfg", "family = generic\ngeneric.file = bad.csv\n");
    auto r = run({"ptcheck", "--config", cfg, "--format", "csv"});
    CHECK(r.code == 1);
    CHECK(r.out.find("pt_check,false") != std::string::npos);
    r = run({"verify", "--config", cfg});
    CHECK(r.code == 1);
    CHECK(r.out.find("\"pt_check\"") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("Rosen-Morse verify reports the spinor adjudication")
{
    const auto r = run({"verify", "--config", configs + "rosen_morse.cfg"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    bool seen = false;
    for (const auto& c : j["checks"])
        if (c["name"] == "spinor_adjudication n=0") {
            seen = true;
            CHECK(!c["detail"].get<std::string>().empty());
        }
    CHECK(seen);
}

TEST_CASE("norm command")
{
    const auto d = scratch();
    const auto cfg = write(d / "o.cfg", slurp(configs + "oscillator.cfg") + "n = 1\n");
    const auto r = run({"norm", "--config", cfg});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["N_closed_form"].get<double>() - ref::osc_n1) < 1e-10);
    CHECK(std::abs(j["integral"].get<double>() - 1.0) < 1e-6);
    fs::remove_all(d);
}
