/**
 * Copyright 2026 The heraldswap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heraldswap/cli.hpp"
#include "heraldswap/optimize.hpp"

using namespace heraldswap;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "heraldswap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

using Row = std::vector<std::string>;

std::vector<Row> parse_csv(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    Row r;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) r.push_back(cell);
    rows.push_back(r);
  }
  return rows;
}

std::size_t column(const std::vector<Row>& rows, const std::string& name) {
  for (std::size_t i = 0; i < rows.front().size(); ++i)
    if (rows.front()[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

double cell(const std::vector<Row>& rows, std::size_t row, const std::string& name) {
  return std::stod(rows.at(row).at(column(rows, name)));
}

}  // namespace

TEST(CliHerald, ReportsIdealDualRail) {
  const auto r = run({"herald", "--encoding", "dual", "--eta-db", "3", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["fidelity"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["p_succ"].get<double>(), db_to_eta(3.0) / 2, 1e-12);
  EXPECT_EQ(j["rho_re"].size(), 4u);
}

TEST(CliHerald, TextAndCsvAgree) {
  const auto text = run({"herald", "--eta", "0.25", "--gamma", "0.3", "--pd", "1e-3"});
  ASSERT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("fidelity"), std::string::npos);
  const auto csv = parse_csv(run({"herald", "--eta", "0.25", "--gamma", "0.3", "--pd", "1e-3", "--format", "csv"}).out);
  ASSERT_EQ(csv.size(), 2u);
  auto p = LinkParams::symmetric(Encoding::SingleRail, 0.25, 0.3);
  p.p_d = 1e-3;
  const auto m = evaluate(p);
  EXPECT_NEAR(cell(csv, 1, "fidelity"), m.fidelity, 1e-11);
  EXPECT_NEAR(cell(csv, 1, "rate"), m.rate, 1e-11);
  EXPECT_NEAR(cell(csv, 1, "rho_re_12"), herald(p).state(basis::k10, basis::k01).real(), 1e-11);
}

TEST(CliHerald, UsageErrors) {
  EXPECT_EQ(run({"herald", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"herald", "--eta", "0.5", "--eta-db", "3"}).code, 2);
  EXPECT_EQ(run({"herald", "--gamma", "0.5", "--gamma-opt"}).code, 2);
  EXPECT_EQ(run({"herald", "--encoding", "triple"}).code, 2);
  const auto bad = run({"herald", "--vis", "1.5"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_FALSE(bad.err.empty());
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliSweep, RowCountAndRoundTrip) {
  const auto r = run({"sweep", "--encoding", "single", "--start", "0", "--stop", "40", "--points", "2", "--pd", "1e-4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    LinkParams p = LinkParams::symmetric(Encoding::SingleRail, db_to_eta(cell(rows, i, "eta_total_db")),
                                         cell(rows, i, "gamma"));
    p.p_d = 1e-4;
    const auto m = evaluate(p);
    EXPECT_NEAR(cell(rows, i, "hashing"), m.hashing, 1e-10 * std::max(1.0, std::abs(m.hashing)));
    EXPECT_NEAR(cell(rows, i, "rate"), m.rate, 1e-11);
    EXPECT_GT(cell(rows, i, "d2"), cell(rows, i, "rate"));
  }
}

TEST(CliSweep, OptimizedGammaColumn) {
  const auto rows = parse_csv(run({"sweep", "--gamma-opt", "--start", "60", "--stop", "60", "--points", "1"}).out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(cell(rows, 1, "gamma_opt"), 0.8584, 1e-3);
}

TEST(CliSweep, InfeasiblePointsPrintNan) {
  const auto r = run({"sweep", "--target-fidelity", "0.999", "--pd", "1e-2", "--start", "60", "--stop", "60",
                      "--points", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("nan"), std::string::npos);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliSweep, JobsDoNotChangeOutput) {
  const std::vector<std::string> base{"sweep", "--gamma-opt", "--pd", "1e-3", "--points", "9", "--stop", "80"};
  auto one = base, four = base;
  one.insert(one.end(), {"--jobs", "1"});
  four.insert(four.end(), {"--jobs", "4"});
  EXPECT_EQ(run(one).out, run(four).out);
}

TEST(CliDistill, ZeroRoundsMatchesSweep) {
  const auto d = parse_csv(
      run({"distill", "--encoding", "dual", "--pd", "1e-3", "--rounds", "0", "--start", "10", "--stop", "10", "--points",
           "1"})
          .out);
  const auto s = parse_csv(
      run({"sweep", "--encoding", "dual", "--pd", "1e-3", "--start", "10", "--stop", "10", "--points", "1"}).out);
  ASSERT_EQ(d.size(), 2u);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(d[1][column(d, "rate")], s[1][column(s, "rate")]);
  EXPECT_EQ(d[1][column(d, "hashing")], s[1][column(s, "hashing")]);
}

TEST(CliDistill, RoundsAndEngineValidation) {
  EXPECT_EQ(run({"distill", "--rounds", "16"}).code, 2);
  EXPECT_EQ(run({"distill", "--engine", "magic"}).code, 2);
  const auto rows = parse_csv(run({"distill", "--rounds", "2", "--start", "10", "--stop", "30", "--points", "3", "--engine", "map"}).out);
  EXPECT_EQ(rows.size(), 1u + 3 * 3);
  EXPECT_EQ(rows[1][column(rows, "approximate")], "true");
}

TEST(CliDistill, MaxRangeGrowsWithRounds) {
  const auto rows = parse_csv(run({"distill", "--encoding", "dual", "--pd", "1e-2", "--rounds", "3", "--max-range"}).out);
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t k = 2; k < rows.size(); ++k)
    EXPECT_GT(cell(rows, k, "max_range_db"), cell(rows, k - 1, "max_range_db"));
}

TEST(CliRange, NoiselessLinkIsUnbounded) {
  const auto r = run({"range"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("unbounded within scan"), std::string::npos);
}

TEST(CliRange, DualRailReachesFurther) {
  const auto rows = parse_csv(run({"range", "--pd", "1e-3"}).out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "single");
  EXPECT_EQ(rows[2][0], "dual");
  EXPECT_GT(cell(rows, 2, "max_range_db"), cell(rows, 1, "max_range_db"));
  LinkParams p;
  p.encoding = Encoding::DualRail;
  p.p_d = 1e-3;
  EXPECT_NEAR(cell(rows, 2, "eta_lim_db"), eta_lim(p).eta_max_db, 1e-8);
}

TEST(CliRange, ContourGrid) {
  const auto rows = parse_csv(run({"range", "--encoding", "dual", "--grid", "3"}).out);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0][column(rows, "eta_lim_db")], "eta_lim_db");
  EXPECT_EQ(run({"range", "--grid", "1"}).code, 2);
}

TEST(CliVerify, PassesAndIsDeterministic) {
  const auto a = run({"verify", "--grid", "20", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, run({"verify", "--grid", "20", "--seed", "7", "--jobs", "3"}).out);
  const auto j = nlohmann::json::parse(run({"verify", "--grid", "5", "--format", "json"}).out);
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(CliVerify, InjectedErrorFails) {
  const auto r = run({"verify", "--grid", "10", "--inject-error", "1e-6"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("above tolerance"), std::string::npos);
}

TEST(CliBound, RepeaterlessValue) {
  const auto rows = parse_csv(run({"bound", "--eta-db", "10"}).out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(cell(rows, 1, "d2"), -std::log2(1 - std::sqrt(0.1)), 1e-11);
}

TEST(CliConfig, FileValuesAndOverrides) {
  const auto path = std::filesystem::temp_directory_path() / "heraldswap_cli_test.ini";
  {
    std::ofstream f(path);
    f << "encoding=dual\npd=0.01\neta-db=20\n";
  }
  const auto from_file = nlohmann::json::parse(run({"herald", "--config", path.string(), "--format", "json"}).out);
  EXPECT_EQ(from_file["encoding"], "dual");
  EXPECT_NEAR(from_file["eta_total_db"].get<double>(), 20.0, 1e-9);
  const auto override_pd = nlohmann::json::parse(
      run({"herald", "--config", path.string(), "--pd", "0", "--format", "json"}).out);
  EXPECT_NEAR(override_pd["fidelity"].get<double>(), 1.0, 1e-12);
  EXPECT_LT(from_file["fidelity"].get<double>(), 1.0);
  EXPECT_EQ(run({"herald", "--config", path.string(), "--eta", "0.5"}).code, 0);
  EXPECT_EQ(run({"herald", "--config", "/nonexistent/heraldswap.ini"}).code, 2);
  std::filesystem::remove(path);
}

TEST(CliFormat, NumbersUseClassicLocale) {
  EXPECT_EQ(cli::format_number(0.5), "0.5");
  EXPECT_EQ(cli::format_number(std::nan("")), "nan");
  EXPECT_EQ(cli::format_number(std::numeric_limits<double>::infinity()), "inf");
}
