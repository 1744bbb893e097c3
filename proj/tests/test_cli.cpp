#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mfd/billiard.hpp"
#include "mfd/crossover.hpp"
#include "mfd/errors.hpp"

using namespace mfd;
using namespace mfd::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("mfd_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

int run_argv(std::vector<std::string> args) {
  args.insert(args.begin(), "mfd");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config merging and hashing") {
  auto cfg = make_config("rmt", {{"n_dim", 50}});
  CHECK(cfg.params["n_dim"] == 50);
  CHECK(cfg.params["n_members"] == 200);
  CHECK_THROWS_AS(make_config("rmt", {{"bogus", 1}}), DomainError);
  CHECK_THROWS_AS(make_config("nope"), DomainError);
  auto other = cfg;
  other.threads = 7;
  other.out = "/elsewhere";
  CHECK(other.hash() == cfg.hash());
  other.seed = 1;
  CHECK(other.hash() != cfg.hash());
  CHECK(cfg.hash().size() == 16);
}

TEST_CASE("analytic command rows") {
  auto cfg = make_config("analytic", {{"q", {1, 2}}, {"n", {1000, 100000}}, {"eps", {1e4}}});
  cfg.out = scratch("analytic");
  const auto rep = run_command(cfg);
  CHECK(rep.ok());
  const auto text = slurp(cfg.out / "analytic_dq.csv");
  CHECK(text.rfind("# mfd ", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const auto rows = read_csv(cfg.out / "analytic_dq.csv");
  REQUIRE(rows.size() == 1 + 3 * 4);
  CHECK(rows[0] == std::vector<std::string>{"family", "eps", "q", "N", "Dq", "Sq"});
  double ue_q1 = 0;
  for (const auto& r : rows)
    if (r[0] == "UE" && r[2] == "1" && r[3] == "1000") ue_q1 = std::stod(r[4]);
  CHECK(ue_q1 == doctest::Approx(0.93887).epsilon(1e-5));
  // eps = 1e4 rows approach the UE rows.
  for (const auto& r : rows) {
    if (r[0] != "crossover") continue;
    for (const auto& u : rows)
      if (u[0] == "UE" && u[2] == r[2] && u[3] == r[3]) CHECK(std::abs(std::stod(r[4]) - std::stod(u[4])) < 1e-3);
  }
}

TEST_CASE("analytic command: OE S_2 approaches ln 3") {
  auto cfg = make_config("analytic", {{"q", {2}}, {"n", {100, 10000, 1000000}}, {"eps", json::array()}});
  cfg.out = scratch("analytic_oe");
  run_command(cfg);
  std::vector<double> gaps;
  for (const auto& r : read_csv(cfg.out / "analytic_dq.csv"))
    if (r[0] == "OE") gaps.push_back(std::abs(std::stod(r[5]) - std::log(3.0)));
  REQUIRE(gaps.size() == 3);
  CHECK(gaps[2] < gaps[1]);
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < 1e-5);
}

TEST_CASE("rmt command outputs and replay") {
  auto cfg = make_config("rmt", {{"n_dim", 60}, {"alpha", 0.3}, {"n_members", 6}, {"fit_samples", 5000}});
  cfg.seed = 17;
  cfg.out = scratch("rmt_a");
  cfg.threads = 1;
  const auto rep = run_command(cfg);
  CHECK(rep.ok());
  for (auto f : {"run_config.json", "hist.csv", "qsweep.csv", "profile.csv", "fit.json"})
    CHECK(fs::exists(cfg.out / f));
  const auto prof = read_csv(cfg.out / "profile.csv");
  CHECK(prof.size() == 61);
  CHECK(prof[0] == std::vector<std::string>{"index", "eigenvalue", "D1", "D2", "S1", "S2"});
  const json fit = json::parse(slurp(cfg.out / "fit.json"));
  CHECK(fit["n_samples"].get<long>() > 1000);
  CHECK(fit["meta"]["config"] == cfg.hash());

  // Replaying the saved config through argv reproduces every file.
  const auto replay = scratch("rmt_b");
  CHECK(run_argv({"rmt", "--config", (cfg.out / "run_config.json").string(), "--out", replay.string(), "--threads", "3"}) == 0);
  for (auto f : {"run_config.json", "hist.csv", "qsweep.csv", "profile.csv", "fit.json"})
    CHECK(slurp(cfg.out / f) == slurp(replay / f));
}

TEST_CASE("explicit flags override the config file") {
  auto cfg = make_config("rmt", {{"n_dim", 30}, {"n_members", 2}, {"analyses", {"qsweep"}}});
  cfg.out = scratch("rmt_cfg");
  run_command(cfg);
  const auto out = scratch("rmt_cfg2");
  CHECK(run_argv({"rmt", "--config", (cfg.out / "run_config.json").string(), "--n", "40", "--seed", "5", "--out",
                  out.string()}) == 0);
  const json saved = json::parse(slurp(out / "run_config.json"));
  CHECK(saved["params"]["n_dim"] == 40);
  CHECK(saved["params"]["n_members"] == 2);
  CHECK(saved["seed"] == 5);
  CHECK(run_argv({"qkr", "--config", (cfg.out / "run_config.json").string(), "--out", out.string()}) == 2);
}

TEST_CASE("json table format") {
  auto cfg = make_config("rmt", {{"n_dim", 30}, {"n_members", 2}, {"analyses", {"qsweep"}}});
  cfg.format = "json";
  cfg.out = scratch("json");
  run_command(cfg);
  const json t = json::parse(slurp(cfg.out / "qsweep.json"));
  CHECK(t["columns"] == json({"q", "Dq", "Sq"}));
  CHECK(t["rows"].size() == 6);
  CHECK(t["meta"]["config"] == cfg.hash());
}

TEST_CASE("failed analyses give a nonzero exit code") {
  const auto out = scratch("fail");
  // Too few components for a fit.
  CHECK(run_argv({"rmt", "--n", "10", "--members", "2", "--analyses", "fit", "--out", out.string()}) == 1);
  CHECK(run_argv({"rmt", "--alpha", "2", "--out", out.string()}) == 2);
  CHECK(run_argv({"nonsense"}) != 0);
}

TEST_CASE("qkr, billiard, spinchain and fit commands") {
  auto q = make_config("qkr", {{"n_dim", 31}, {"n_members", 4}, {"analyses", {"profile", "qsweep"}}});
  q.out = scratch("qkr");
  CHECK(run_command(q).ok());
  CHECK(read_csv(q.out / "profile.csv").size() == 32);

  auto b = make_config("billiard", {{"width", 14}, {"height", 16}, {"semi_a", 8}, {"semi_b", 6}, {"b_field", 0.2},
                                    {"sites", true}, {"analyses", {"profile"}}, {"dos_bin", 0.5}});
  b.out = scratch("billiard");
  CHECK(run_command(b).ok());
  const auto dos = read_csv(b.out / "dos.csv");
  REQUIRE(dos.size() == 17);
  CHECK(dos[0] == std::vector<std::string>{"E", "rho_emp", "rho_theory"});
  CHECK(std::stod(dos[3][2]) == doctest::Approx(billiard_dos_theory(std::stod(dos[3][0]))).epsilon(1e-15));
  CHECK(read_csv(b.out / "sites.csv")[0] == std::vector<std::string>{"site_index", "x", "y"});

  auto s = make_config("spinchain", {{"length", 8}, {"sz", 0.0}, {"k_list", {0.0, 0.3}}, {"basis", true},
                                     {"analyses", {"profile", "qsweep"}}});
  s.out = scratch("spin");
  CHECK(run_command(s).ok());
  CHECK(fs::exists(s.out / "profile_K0.csv"));
  CHECK(fs::exists(s.out / "profile_K0.3.csv"));
  CHECK(read_csv(s.out / "basis.csv").size() == 71);

  // fit from an eigen cache and from a text file of samples.
  auto r = make_config("rmt", {{"n_dim", 50}, {"alpha", 1.0}, {"n_members", 3}, {"analyses", {"qsweep"}}});
  r.out = scratch("cache");
  r.params["cache"] = (r.out / "eigs.bin").string();
  fs::create_directories(r.out);
  CHECK(run_command(r).ok());
  auto f = make_config("fit", {{"cache", (r.out / "eigs.bin").string()}});
  f.out = r.out / "fit";
  CHECK(run_command(f).ok());
  const json fit = json::parse(slurp(f.out / "fit.json"));
  CHECK(fit["n_samples"] == 7500);
  CHECK(fit["eps_hat"].get<double>() > 3.0);

  std::ofstream samples(r.out / "x.txt");
  samples << "x\n";
  for (int i = 0; i < 3000; ++i) samples << -std::log(1.0 - (i + 0.5) / 3000.0) << "\n";
  samples.close();
  auto g = make_config("fit", {{"input", (r.out / "x.txt").string()}});
  g.out = r.out / "fit_txt";
  CHECK(run_command(g).ok());
  CHECK(json::parse(slurp(g.out / "fit.json"))["boundary_hit"] == true);
  auto none = make_config("fit");
  CHECK_THROWS_AS(run_command(none), DomainError);
}
