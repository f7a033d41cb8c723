#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaussdiv/cli.hpp"
#include "gaussdiv/models.hpp"

using namespace gaussdiv;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string & name)
{
    return std::string(GAUSSDIV_DATA_DIR) + "/" + name;
}

std::filesystem::path scratch(const std::string & name)
{
    const auto dir = std::filesystem::temp_directory_path() / "gaussdiv_test_cli";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::filesystem::path write_file(const std::string & name, const std::string & text)
{
    const auto path = scratch(name);
    std::ofstream(path) << text;
    return path;
}

std::vector<std::vector<std::string>> parse_csv(const std::string & text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("check-channel classifies the reference channels")
{
    const Result att = run({"check-channel", data("attenuator.json")});
    CHECK(att.code == cli::kOk);
    CHECK(json::parse(att.out)["class"] == "CP");

    const Result tr = run({"check-channel", data("transposition.json")});
    CHECK(tr.code == cli::kOk);
    const json v = json::parse(tr.out);
    CHECK(v["class"] == "P_not_CP");
    CHECK(v["cp_margin"].get<double>() == doctest::Approx(-1.0));
    CHECK(v["p_method"] == "scan");
    CHECK(v["witness"].size() == 4);

    const Result np = run({"check-channel", data("np_channel.json"), "--format", "csv"});
    CHECK(np.code == cli::kOk);
    const auto rows = parse_csv(np.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"class", "cp_margin", "p_margin", "p_method"});
    CHECK(rows[1][0] == "NP");
}

TEST_CASE("two-mode channels report the falsifier-only method")
{
    const auto path = write_file("two_mode.json", R"({"n": 2,
        "X": [[0.5,0,0,0],[0,0.5,0,0],[0,0,0.5,0],[0,0,0,0.5]],
        "Y": [[0.5,0,0,0],[0,0.5,0,0],[0,0,0.5,0],[0,0,0,0.5]]})");
    const Result r = run({"check-channel", path.string()});
    CHECK(r.code == cli::kOk);
    const json v = json::parse(r.out);
    CHECK(v["class"] == "CP");
    CHECK(v["p_method"] == "falsifier-only");
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("trajectory CSV contract")
{
    for (const int n : {2, 17, 400}) {
        const Result r = run({"trajectory", data("qbm.json"), "--grid", std::to_string(n)});
        CHECK(r.code == cli::kOk);
        const auto rows = parse_csv(r.out);
        REQUIRE(rows.size() == static_cast<std::size_t>(n) + 1);
        CHECK(rows[0] == std::vector<std::string>{"t", "eps", "mu", "delta", "kappa", "region"});
        double last = -1.0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            REQUIRE(rows[i].size() == 6);
            const double t = std::stod(rows[i][0]);
            CHECK(t > last);
            last = t;
            const std::string & region = rows[i][5];
            CHECK((region == "CP" || region == "P_not_CP" || region == "NP"));
        }
    }
}

TEST_CASE("property: trajectory rates round-trip through the CSV")
{
    const Result r = run({"trajectory", data("two_phase.json"), "--grid", "64"});
    REQUIRE(r.code == cli::kOk);
    const RateProfile rates = RateProfile::piecewise({{0.0, 1.0, 0.0, 1.0}, {1.0, 2.0, 1.0, 0.0}});
    const auto rows = parse_csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double t = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][1]) == doctest::Approx(rates.eps(t)).epsilon(1e-6).scale(1.0));
        CHECK(std::stod(rows[i][2]) == doctest::Approx(rates.mu(t)).epsilon(1e-6).scale(1.0));
        CHECK(rows[i][5] == (t < 1.0 ? "CP" : "P_not_CP"));
    }
}

TEST_CASE("damping border rows are CP with eps = -gamma and mu = gamma")
{
    const Result r = run({"trajectory", data("damping.json"), "--grid", "50"});
    REQUIRE(r.code == cli::kOk);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 51);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][1]) == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(std::stod(rows[i][2]) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rows[i][5] == "CP");
    }
}

TEST_CASE("classify-process verdicts")
{
    const Result weak = run({"classify-process", data("two_phase.json")});
    CHECK(weak.code == cli::kOk);
    const json w = json::parse(weak.out);
    CHECK(w["class"] == "weak");
    CHECK(w["physical"] == true);
    CHECK(w["violation_time"].is_null());
    REQUIRE(w["crossings"].size() == 1);
    CHECK(w["crossings"][0]["t"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(w["samples"].size() == 400);

    const Result markov = run({"classify-process", data("tabulated_damping.json")});
    CHECK(markov.code == cli::kOk);
    CHECK(json::parse(markov.out)["class"] == "markovian");

    const Result qbm = run({"classify-process", data("qbm.json"), "--format", "csv"});
    CHECK(qbm.code == cli::kOk);
    CHECK(qbm.out.rfind("t,eps,mu,delta,kappa,region\n", 0) == 0);
}

TEST_CASE("globally unphysical input exits 2 and reports the violation time")
{
    const double root = 1.0 + std::log(3.0) / 2.0;
    const Result c = run({"classify-process", data("strong_two_phase.json")});
    CHECK(c.code == cli::kUnphysical);
    const json v = json::parse(c.out);
    CHECK(v["physical"] == false);
    CHECK(v["violation_time"].get<double>() == doctest::Approx(root).epsilon(1e-6));
    CHECK(c.err.find("globally unphysical") != std::string::npos);

    const Result p = run({"physicality", data("strong_two_phase.json"), "--format", "json"});
    CHECK(p.code == cli::kUnphysical);
    CHECK(json::parse(p.out)["violation_time"].get<double>() == doctest::Approx(root).epsilon(1e-6));

    CHECK(run({"trajectory", data("strong_two_phase.json")}).code == cli::kUnphysical);
}

TEST_CASE("physicality CSV")
{
    const Result r = run({"physicality", data("two_phase.json"), "--grid", "8"});
    CHECK(r.code == cli::kOk);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 9);
    CHECK(rows[0] == std::vector<std::string>{"t", "lambda_plus", "lambda_minus", "integral_plus", "integral_minus"});
    CHECK(std::stod(rows[8][0]) == doctest::Approx(2.0));
}

TEST_CASE("amplification windows")
{
    const Result r = run({"amplification", data("two_phase.json")});
    CHECK(r.code == cli::kOk);
    const json v = json::parse(r.out);
    REQUIRE(v["windows"].size() == 1);
    CHECK(v["windows"][0]["t_start"].get<double>() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(v["windows"][0]["max_gap"].get<double>() == doctest::Approx(1.0));

    const Result none = run({"amplification", data("damping.json")});
    CHECK(none.code == cli::kOk);
    CHECK(json::parse(none.out)["windows"].empty());

    const Result csv = run({"amplification", data("two_phase.json"), "--format", "csv"});
    CHECK(parse_csv(csv.out)[0] == std::vector<std::string>{"t_start", "t_end", "max_gap"});
}

TEST_CASE("bad input exits 1")
{
    CHECK(run({}).code == cli::kBadInput);
    CHECK(run({"frobnicate", data("qbm.json")}).code == cli::kBadInput);
    CHECK(run({"trajectory", data("qbm.json"), "--bogus"}).code == cli::kBadInput);
    CHECK(run({"trajectory", data("qbm.json"), "--grid", "1"}).code == cli::kBadInput);
    CHECK(run({"trajectory", data("qbm.json"), "--tol", "-1"}).code == cli::kBadInput);
    CHECK(run({"trajectory", data("qbm.json"), "--format", "xml"}).code == cli::kBadInput);
    CHECK(run({"trajectory", scratch("missing.json").string()}).code == cli::kBadInput);
    CHECK(run({"trajectory", write_file("broken.json", "{\"type\": ").string()}).code == cli::kBadInput);
    CHECK(run({"trajectory", write_file("unknown.json", R"({"type": "spiral"})").string()}).code ==
          cli::kBadInput);
    CHECK(run({"check-channel", write_file("bad_y.json", R"({"n": 1, "X": [1,0,0,1], "Y": [0,1,0,0]})").string()})
              .code == cli::kBadInput);
    const Result tab = run({"physicality", data("tabulated_damping.json")});
    CHECK(tab.code == cli::kBadInput);
    CHECK_FALSE(tab.err.empty());
}

TEST_CASE("singular paths exit 3")
{
    const Result r = run({"classify-process", data("singular.json")});
    CHECK(r.code == cli::kNumericalFailure);
    CHECK(r.err.find("numerical failure at t = ") != std::string::npos);
}

TEST_CASE("output is byte-identical across runs and thread counts")
{
    const Result a = run({"trajectory", data("qbm.json"), "--seed", "3"});
    const Result b = run({"trajectory", data("qbm.json"), "--seed", "3"});
    ::setenv("GAUSSDIV_THREADS", "4", 1);
    const Result c = run({"trajectory", data("qbm.json"), "--seed", "3"});
    ::unsetenv("GAUSSDIV_THREADS");
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    const Result d = run({"check-channel", data("transposition.json"), "--seed", "9"});
    CHECK(d.out == run({"check-channel", data("transposition.json"), "--seed", "9"}).out);
}

TEST_CASE("--out writes the report to a file")
{
    const auto path = scratch("trajectory.csv");
    std::filesystem::remove(path);
    const Result r = run({"trajectory", data("two_phase.json"), "--grid", "10", "--out", path.string()});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == run({"trajectory", data("two_phase.json"), "--grid", "10"}).out);
    for (const auto & entry : std::filesystem::directory_iterator(path.parent_path()))
        CHECK(entry.path().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("GAUSSDIV_THREADS")
{
    ::setenv("GAUSSDIV_THREADS", "3", 1);
    CHECK(cli::threads_from_env() == 3);
    ::setenv("GAUSSDIV_THREADS", "", 1);
    CHECK(cli::threads_from_env() == 0);
    ::setenv("GAUSSDIV_THREADS", "many", 1);
    CHECK_THROWS(cli::threads_from_env());
    ::unsetenv("GAUSSDIV_THREADS");
    CHECK(cli::threads_from_env() == 0);
}
