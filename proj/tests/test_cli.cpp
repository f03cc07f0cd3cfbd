#include "doctest.h"

#include "cli.hpp"
#include "report.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using kelly::cli::run_cli;

namespace
{

struct Run
{
    int code = -1;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

double cell(const std::string& csv, const std::string& column, std::size_t row = 0)
{
    const auto rows = csv_rows(csv);
    const auto& header = rows.at(0);
    const auto it = std::find(header.begin(), header.end(), column);
    REQUIRE(it != header.end());
    return std::stod(rows.at(row + 1).at(static_cast<std::size_t>(it - header.begin())));
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("single: no-tail endpoints")
    {
        const Run r = run({"single", "--mu", "0.004", "--sigma", "0.10", "--output", "csv"});
        REQUIRE(r.code == 0);
        CHECK(std::abs(cell(r.out, "f0") - 0.4) < 1e-3);
        CHECK(std::abs(cell(r.out, "g0") - 0.0008) < 1e-6);
        CHECK(cell(r.out, "log_drift") == doctest::Approx(-0.001));
    }

    TEST_CASE("single: fat-tail exact optimum")
    {
        const Run r = run({"single", "--mu", "0.004", "--sigma", "0.10", "--alpha", "0.02", "--etl", "0.10", "--output",
                           "csv"});
        REQUIRE(r.code == 0);
        CHECK(cell(r.out, "f1_exact") == doctest::Approx(0.19).epsilon(0.02));
    }

    TEST_CASE("exit codes")
    {
        CHECK(run({"single", "--mu", "0.004", "--sigma", "0.004"}).code == 2);
        CHECK(run({"single", "--mu", "0.004"}).code == 2);
        CHECK(run({"bogus"}).code == 2);
        CHECK(run({"single", "--mu", "0.004", "--sigma", "0.1", "--output", "xml"}).code == 2);
        // Singular covariance is an infeasible allocation.
        CHECK(run({"parity", "--premiums", "0.05,0.03", "--cov", "0.04,0.04,0.04,0.04"}).code == 3);
        CHECK(run({"simulate", "--mu", "0.004", "--sigma", "0.1", "--alpha", "0.02", "--etl", "0.1", "--leverage",
                   "10"})
                  .code == 3);
        CHECK(run({"estimate", "--input", "no_such_returns.csv"}).code == 4);
        CHECK(run({"single", "--mu", "0.004", "--sigma", "0.1", "--config", "no_such.ini"}).code == 4);
        const Run help = run({"--help"});
        CHECK(help.code == 0);
        CHECK(help.out.find("frontier") != std::string::npos);
    }

    TEST_CASE("config sections feed the matching subcommand; unknown keys are rejected")
    {
        {
            std::ofstream cfg("two_asset.cfg");
            cfg << "output=csv\n[parity]\npremiums=0.05,0.03\nsigmas=0.2,0.1\ncorr=1,0.3,0.3,1\n";
        }
        const Run r = run({"parity", "--config", "two_asset.cfg"});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("normalized_kelly") != std::string::npos);
        CHECK(cell(r.out, "fraction") == doctest::Approx((1.25 - 0.45) / 0.91));
        CHECK(cell(r.out, "normalized_kelly") == doctest::Approx(cell(r.out, "tangency")));

        {
            std::ofstream cfg("typo.cfg");
            cfg << "[single]\nmu=0.004\nsigma=0.1\nsgima=0.2\n";
        }
        const Run bad = run({"single", "--config", "typo.cfg"});
        CHECK(bad.code == 2);
        CHECK(bad.err.find("sgima") != std::string::npos);
    }

    TEST_CASE("scenario preset")
    {
        const Run r = run({"scenario", "--preset", "brown", "--bet", "0.2", "--output", "csv"});
        REQUIRE(r.code == 0);
        CHECK(std::abs(cell(r.out, "wealth_multiple", 0) - 7.49) < 0.01);
        const Run custom = run({"scenario", "--legs", "1:1", "--bet", "0", "--output", "csv"});
        CHECK(cell(custom.out, "wealth_multiple") == 1.0);
    }

    TEST_CASE("sweep CSV: one row per grid point, every numeric cell reloads")
    {
        const Run r = run({"sweep", "--mu0", "0.00192", "--sigma0", "0.0999", "--alpha", "0.02", "--etl-max", "0.20",
                           "--steps", "40", "--output", "csv"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 42);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            for (std::size_t c = 0; c + 1 < rows[i].size(); ++c) {
                std::size_t used = 0;
                (void)std::stod(rows[i][c], &used);
                CHECK(used == rows[i][c].size());
            }
        }
        CHECK(std::stod(rows[41][0]) == doctest::Approx(0.2));
    }

    TEST_CASE("--out writes atomically with a metadata sidecar, byte-identical across runs")
    {
        const std::vector<std::string> args{"simulate", "--mu", "0.004", "--sigma", "0.1", "--alpha", "0.02",
                                            "--etl", "0.1", "--paths", "300", "--periods", "50", "--seed", "11",
                                            "--output", "csv", "--out", "sim.csv"};
        REQUIRE(run(args).code == 0);
        const std::string first = slurp("sim.csv");
        const std::string meta = slurp("sim.csv.meta.json");
        REQUIRE(run(args).code == 0);
        CHECK(slurp("sim.csv") == first);
        CHECK(slurp("sim.csv.meta.json") == meta);
        CHECK_FALSE(std::filesystem::exists("sim.csv.tmp"));

        const auto j = nlohmann::json::parse(meta);
        CHECK(j["command"] == "simulate");
        CHECK(j["seed"] == 11);
        CHECK(j["config"]["paths"] == "300");
        CHECK(j["config"]["alpha"] == "0.02");
        CHECK(j.contains("version"));

        auto other = args;
        other[14] = "12";
        REQUIRE(run(other).code == 0);
        CHECK(slurp("sim.csv") != first);
    }

    TEST_CASE("JSON output parses and mirrors the tables")
    {
        const Run r = run({"frontier", "--output", "json"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["command"] == "frontier");
        CHECK(j["tables"]["frontier"].size() == 21);
        for (const auto& row : j["tables"]["concavity"])
            CHECK(row["concave"] == 1.0);
    }

    TEST_CASE("estimate from a CSV file")
    {
        {
            std::ofstream f("returns.csv");
            f << "date,return\n";
            for (int i = 0; i < 100; ++i)
                f << i << "," << ((i * 37) % 100 - 49.5) / 2000.0 << "\n";
        }
        const Run r = run({"estimate", "--input", "returns.csv", "--output", "csv"});
        REQUIRE(r.code == 0);
        CHECK(cell(r.out, "n") == 100.0);
        CHECK(cell(r.out, "alpha") == doctest::Approx(0.05));
    }

    TEST_CASE("number formatting")
    {
        using kelly::cli::format_number;
        CHECK(format_number(0.1234567890123456, 12) == "0.123456789012");
        CHECK(format_number(0.1234567890123456, 6) == "0.123457");
        CHECK(format_number(0.0, 12) == "0");
    }
}
