#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliRun {
  int code;
  std::string out;
};

// Runs the CLI with stdout captured; stderr is discarded unless requested.
CliRun run(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string("\"") + CHARCLASS_CLI + "\" " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t k = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), k);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& name) { return std::string(DEMO_DATA) + "/" + name; }

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("charclass_cli_test_" + name);
  std::ofstream(p) << content;
  return p;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& row) {
  std::vector<std::string> out;
  std::stringstream ss(row);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

TEST(Cli, Transgress) {
  CliRun r = run("transgress --n 1 --p 1");
  EXPECT_EQ(r.code, 0);
  std::string json = r.out.substr(0, r.out.rfind("residual"));
  auto j = nlohmann::json::parse(json);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["theta_indices"], nlohmann::json::array({1}));
  EXPECT_NE(r.out.find("residual: exact zero"), std::string::npos);

  auto out = std::filesystem::temp_directory_path() / "charclass_cli_test_t22.json";
  EXPECT_EQ(run("transgress --n 2 --p 2 --out " + out.string()).code, 0);
  std::ifstream in(out);
  auto t = nlohmann::json::parse(in);
  EXPECT_GT(t.size(), 0u);
  for (auto& term : t) EXPECT_EQ(term["coeff"].size(), 2u);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("transgress --n 5 --p 1").code, 2);
  EXPECT_EQ(run("transgress --n 2 --p 3").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("verify --suite nope").code, 2);
  EXPECT_EQ(run("cocycle --n 1 --p 1 --tuples x.json --order 1").code, 2);
}

TEST(Cli, CocycleLineCase) {
  CliRun r = run("cocycle --n 1 --p 1 --tuples " + data("tuples_n1.json"));
  EXPECT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], "tuple_id,p,n,raw_re,raw_im,reduced,est_error");
  auto f = fields(ls[1]);
  ASSERT_EQ(f.size(), 7u);
  EXPECT_EQ(f[0], "0");
  EXPECT_NEAR(std::stod(f[5]), std::log(2.0), 1e-10);
  EXPECT_NEAR(std::stod(fields(ls[2])[5]), 0.0, 1e-12);
}

TEST(Cli, CocycleBorelDoubles) {
  auto a = lines(run("cocycle --n 1 --p 1 --tuples " + data("tuples_n1.json")).out);
  auto b = lines(run("cocycle --n 1 --p 1 --borel --tuples " + data("tuples_n1.json")).out);
  EXPECT_NEAR(std::stod(fields(b[1])[3]), 2 * std::stod(fields(a[1])[3]), 1e-14);
}

TEST(Cli, CocycleEdgeCases) {
  auto empty = temp_file("empty.json", "[]");
  CliRun r = run("cocycle --n 1 --p 1 --tuples " + empty.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).size(), 1u);

  auto sing = temp_file("sing.json", R"([[{"n":1,"entries":[[[1,0]]]},{"n":1,"entries":[[[0,0]]]}]])");
  CliRun s = run("cocycle --n 1 --p 1 --tuples " + sing.string());
  EXPECT_EQ(s.code, 1);
  EXPECT_EQ(lines(s.out).size(), 1u);

  EXPECT_EQ(run("cocycle --n 1 --p 1 --tuples /nonexistent/tuples.json").code, 3);
  auto garbage = temp_file("garbage.json", "{not json");
  EXPECT_EQ(run("cocycle --n 1 --p 1 --tuples " + garbage.string()).code, 3);
}

TEST(Cli, CsFlat) {
  CliRun r = run("cs-flat --p 1 --cycle " + data("cycle_p1.json"));
  EXPECT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[1].rfind("reduced: ", 0), 0u);
  EXPECT_NEAR(std::stod(ls[1].substr(9)), std::log(3.0), 1e-8);
}

TEST(Cli, Verify) {
  CliRun r = run("verify --suite filtration --seed 3");
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(run("verify --suite filtration --seed 3").out, r.out);
}

TEST(Cli, Filt) {
  CliRun r = run("filt 'dz/w^2'");
  EXPECT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], "dz/w^2 ∈ Q^1 \\ Q^2, F-level -1, log: no");
  EXPECT_EQ(ls[2], "Q^1, not Q^2");
  EXPECT_EQ(lines(run("filt 'dz/z'").out)[1], "log, F^1, Q^1");
  CliRun bad = run("filt 'dz/(w'", true);
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("     ^"), std::string::npos);
}

}  // namespace
