#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "nelsonir.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("nelson_capi_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string serialize(nelsonir_config* cfg) {
  size_t needed = 0;
  REQUIRE(nelsonir_config_serialize(cfg, nullptr, 0, &needed) == NELSONIR_OK);
  std::vector<char> buf(needed);
  REQUIRE(nelsonir_config_serialize(cfg, buf.data(), buf.size(), &needed) ==
          NELSONIR_OK);
  return std::string(buf.data());
}

}  // namespace

TEST_SUITE_BEGIN("capi");

TEST_CASE("version and error strings are always available") {
  CHECK(nelsonir_version() != nullptr);
  CHECK(std::strlen(nelsonir_version()) > 0);
  CHECK(nelsonir_last_error() != nullptr);
}

TEST_CASE("config handles round-trip through serialize and parse") {
  nelsonir_config* cfg = nullptr;
  REQUIRE(nelsonir_config_create(&cfg) == NELSONIR_OK);
  REQUIRE(nelsonir_config_set(cfg, "model.e", "0.125") == NELSONIR_OK);
  std::string text = serialize(cfg);
  CHECK(text.find("e = 0.125") != std::string::npos);

  nelsonir_config* back = nullptr;
  REQUIRE(nelsonir_config_parse(text.c_str(), &back) == NELSONIR_OK);
  CHECK(serialize(back) == text);

  uint64_t h1 = 0, h2 = 0;
  REQUIRE(nelsonir_config_hash(cfg, &h1) == NELSONIR_OK);
  REQUIRE(nelsonir_config_hash(back, &h2) == NELSONIR_OK);
  CHECK(h1 == h2);
  nelsonir_config_free(cfg);
  nelsonir_config_free(back);
}

TEST_CASE("invalid keys and null arguments produce status codes and messages") {
  nelsonir_config* cfg = nullptr;
  REQUIRE(nelsonir_config_create(&cfg) == NELSONIR_OK);
  CHECK(nelsonir_config_set(cfg, "model.gravity", "9.8") == NELSONIR_ERR_INVALID);
  CHECK(std::string(nelsonir_last_error()).find("model.gravity") !=
        std::string::npos);
  CHECK(nelsonir_config_set(nullptr, "model.e", "1") == NELSONIR_ERR_INVALID);
  CHECK(nelsonir_config_parse("[model]\ne = frog\n", &cfg) ==
        NELSONIR_ERR_INVALID);
  CHECK(nelsonir_config_load("/no/such/config.ini", &cfg) ==
        NELSONIR_ERR_INVALID);
  nelsonir_config_free(cfg);
}

TEST_CASE("direct evaluators match closed forms") {
  double w = 0.0;
  REQUIRE(nelsonir_pair_potential(1.0, 1.0, 0.0, 0.0, &w) == NELSONIR_OK);
  CHECK(w < 0.0);
  double w0 = 0.0;
  REQUIRE(nelsonir_pair_potential(0.0, 1.0, 1.0, 1.0, &w0) == NELSONIR_OK);
  CHECK(w0 == 0.0);

  double xi = 0.0;
  REQUIRE(nelsonir_classical_minimizer(1.0, 1.0, 2.0, &xi) == NELSONIR_OK);
  double expected = -std::erf(2.0) / (8.0 * M_PI);
  CHECK(xi == doctest::Approx(expected).epsilon(1e-12));

  double e0 = 1.0, n = 1.0;
  REQUIRE(nelsonir_van_hove(0.0, 1.0, "unit", 1.0, 0.1, 6.0, 6, 2, 0, 0, 0, &e0,
                            &n) == NELSONIR_OK);
  CHECK(e0 == 0.0);
  CHECK(n == 0.0);
  REQUIRE(nelsonir_van_hove(1.0, 1.0, "zero", 1.0, 0.1, 6.0, 6, 2, 0, 0, 0, &e0,
                            &n) == NELSONIR_OK);
  CHECK(e0 < 0.0);
  CHECK(n > 0.0);
  CHECK(nelsonir_van_hove(1.0, 1.0, "purple", 1.0, 0.1, 6.0, 6, 2, 0, 0, 0, &e0,
                          &n) == NELSONIR_ERR_INVALID);
}

TEST_CASE("run dispatches experiments and reports failures") {
  nelsonir_config* cfg = nullptr;
  REQUIRE(nelsonir_config_create(&cfg) == NELSONIR_OK);
  auto dir = fresh_dir("run");
  REQUIRE(nelsonir_run(cfg, "minimizer", dir.string().c_str(), 0) == NELSONIR_OK);
  CHECK(fs::exists(dir / "minimizer.csv"));
  CHECK(fs::exists(dir / "manifest.txt"));

  CHECK(nelsonir_run(cfg, "teleport", dir.string().c_str(), 0) ==
        NELSONIR_ERR_INVALID);
  CHECK(std::string(nelsonir_last_error()).find("teleport") != std::string::npos);

  REQUIRE(nelsonir_config_set(cfg, "grid.k_min", "-1") == NELSONIR_OK);
  CHECK(nelsonir_run(cfg, "scan", dir.string().c_str(), 0) ==
        NELSONIR_ERR_INVALID);
  nelsonir_config_free(cfg);
}

TEST_SUITE_END();
