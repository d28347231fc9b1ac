#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/config.hpp"
#include "core/runner.hpp"

using namespace nelson;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("nelson_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config serialization round-trips and hashes are stable") {
  Config cfg;
  cfg.e = 0.7;
  cfg.k_probes = {0.05, 0.3};
  cfg.st_probes = {{-2.0, 1.0}, {0.0, 3.0}};
  std::string text = cfg.serialize();
  Config back = Config::parse(text);
  CHECK(back.serialize() == text);
  CHECK(back.hash() == cfg.hash());
  CHECK(back.e == 0.7);
  CHECK(back.st_probes.size() == 2);
  CHECK(back.st_probes[1].second == 3.0);

  Config other;
  CHECK(other.hash() != cfg.hash());
}

TEST_CASE("unknown keys and malformed lines are hard errors") {
  CHECK_THROWS_AS(Config::parse("[model]\ntypo_key = 1\n"), ValidationError);
  CHECK_THROWS_AS(Config::parse("[mistyped]\ne = 1\n"), ValidationError);
  CHECK_THROWS_AS(Config::parse("e = 1\n"), ValidationError);  // before a section
  CHECK_THROWS_AS(Config::parse("[model]\ne 0.3\n"), ValidationError);
  CHECK_THROWS_AS(Config::parse("[model]\ne = zebra\n"), ValidationError);
  CHECK_NOTHROW(Config::parse("# comment\n\n[model]\ne = 0.1\n"));
}

TEST_CASE("dotted overrides hit the same table as parsing") {
  Config cfg;
  cfg.set("model.e", "0.25");
  cfg.set("sampler.seed", "99");
  cfg.set("fock.k_mins", "0.5,0.05");
  CHECK(cfg.e == 0.25);
  CHECK(cfg.seed == 99);
  REQUIRE(cfg.fock_k_mins.size() == 2);
  CHECK(cfg.fock_k_mins[1] == 0.05);
  CHECK_THROWS_AS(cfg.set("model.nope", "1"), ValidationError);
  CHECK_THROWS_AS(cfg.set("flat_key", "1"), ValidationError);
}

TEST_CASE("validation rejects inconsistent parameters") {
  auto bad = [](auto mutate) {
    Config cfg;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  };
  bad([](Config& c) { c.k_min = c.k_max; });
  bad([](Config& c) { c.n_burn = c.n_sweeps; });
  bad([](Config& c) { c.ir = "none"; });
  bad([](Config& c) { c.fock_dof = "lattice"; });
  bad([](Config& c) { c.st_probes = {{0.0, 2.0 * c.T}}; });
  bad([](Config& c) { c.block_len = 1; });
  CHECK_NOTHROW(Config{}.validate());
}

TEST_CASE("minimizer run writes listed files with the config hash embedded") {
  Config cfg;
  cfg.e = 1.0;
  auto dir = fresh_dir("minimizer");
  auto man = run(cfg, "minimizer", dir.string());
  CHECK(man.subcommand == "minimizer");
  CHECK(man.config_hash == cfg.hash());
  REQUIRE(!man.files.empty());
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(cfg.hash()));
  for (const auto& f : man.files) {
    REQUIRE(fs::exists(dir / f));
    CHECK(slurp(dir / f).find(hex) != std::string::npos);
  }

  // Coulomb tail: 4pi r xi / (-e) close to 1 at large r (last row, r = 8)
  std::string body = slurp(dir / "minimizer.csv");
  auto last = body.find_last_of('\n', body.size() - 2);
  std::istringstream row(body.substr(last + 1));
  double r, xi, closed, coul, ratio;
  char comma;
  row >> r >> comma >> xi >> comma >> closed >> comma >> coul >> comma >> ratio;
  CHECK(r == 8.0);
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  Config cfg;
  cfg.n_grid = 2000;
  cfg.n_chains = 2;
  auto d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
  run(cfg, "scan", d1.string());
  run(cfg, "scan", d2.string());
  CHECK(slurp(d1 / "scan.csv") == slurp(d2 / "scan.csv"));

  run(cfg, "particle", d1.string());
  run(cfg, "particle", d2.string());
  CHECK(slurp(d1 / "paths.csv") == slurp(d2 / "paths.csv"));

  Config reseeded = cfg;
  reseeded.seed = 2;
  auto d3 = fresh_dir("det3");
  run(reseeded, "particle", d3.string());
  CHECK(slurp(d1 / "paths.csv") != slurp(d3 / "paths.csv"));
}

TEST_CASE("manifest embeds a config snapshot that re-parses to equality") {
  Config cfg;
  cfg.e = 0.45;
  cfg.T_list = {2.0};
  auto dir = fresh_dir("manifest");
  run(cfg, "scan", dir.string());
  auto man = RunManifest::parse(slurp(dir / "manifest.txt"));
  CHECK(man.subcommand == "scan");
  CHECK(man.seed == cfg.seed);
  CHECK(man.config_hash == cfg.hash());
  CHECK(man.files == std::vector<std::string>{"scan.csv"});
  Config back = Config::parse(man.config_text);
  CHECK(back.serialize() == cfg.serialize());
  CHECK(back.hash() == man.config_hash);
}

TEST_CASE("unknown subcommands and invalid configs fail loudly") {
  Config cfg;
  auto dir = fresh_dir("errors");
  CHECK_THROWS_AS(run(cfg, "teleport", dir.string()), ValidationError);
  cfg.k_min = -1.0;
  CHECK_THROWS_AS(run(cfg, "scan", dir.string()), ValidationError);
}

TEST_SUITE_END();
