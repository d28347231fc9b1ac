#include "nelsonir.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "core/config.hpp"
#include "core/fock.hpp"
#include "core/kernels.hpp"
#include "core/runner.hpp"

using namespace nelson;

struct nelsonir_config {
  Config cfg;
};

namespace {

thread_local std::string g_last_error = "no error";

nelsonir_status fail(nelsonir_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
nelsonir_status guard(Fn&& fn) {
  try {
    fn();
    return NELSONIR_OK;
  } catch (const ValidationError& e) {
    return fail(NELSONIR_ERR_INVALID, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(NELSONIR_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(NELSONIR_ERR_RUNTIME, e.what());
  }
}

}  // namespace

extern "C" {

const char* nelsonir_version(void) { return kArtifactVersion; }

const char* nelsonir_last_error(void) { return g_last_error.c_str(); }

nelsonir_status nelsonir_config_create(nelsonir_config** out) {
  if (!out) return fail(NELSONIR_ERR_INVALID, "null output pointer");
  return guard([&] { *out = new nelsonir_config{}; });
}

nelsonir_status nelsonir_config_load(const char* path, nelsonir_config** out) {
  if (!path || !out) return fail(NELSONIR_ERR_INVALID, "null argument");
  return guard([&] { *out = new nelsonir_config{Config::load(path)}; });
}

nelsonir_status nelsonir_config_parse(const char* text, nelsonir_config** out) {
  if (!text || !out) return fail(NELSONIR_ERR_INVALID, "null argument");
  return guard([&] { *out = new nelsonir_config{Config::parse(text)}; });
}

nelsonir_status nelsonir_config_set(nelsonir_config* cfg, const char* key,
                                    const char* value) {
  if (!cfg || !key || !value) return fail(NELSONIR_ERR_INVALID, "null argument");
  return guard([&] { cfg->cfg.set(key, value); });
}

nelsonir_status nelsonir_config_serialize(const nelsonir_config* cfg, char* buf,
                                          size_t buflen, size_t* needed) {
  if (!cfg || !needed) return fail(NELSONIR_ERR_INVALID, "null argument");
  return guard([&] {
    std::string text = cfg->cfg.serialize();
    *needed = text.size() + 1;
    if (buf && buflen > 0) {
      size_t n = std::min(buflen - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
  });
}

nelsonir_status nelsonir_config_hash(const nelsonir_config* cfg, uint64_t* out) {
  if (!cfg || !out) return fail(NELSONIR_ERR_INVALID, "null argument");
  return guard([&] { *out = cfg->cfg.hash(); });
}

void nelsonir_config_free(nelsonir_config* cfg) { delete cfg; }

nelsonir_status nelsonir_run(const nelsonir_config* cfg, const char* subcommand,
                             const char* out_dir, int threads) {
  if (!cfg || !subcommand || !out_dir)
    return fail(NELSONIR_ERR_INVALID, "null argument");
  return guard([&] { run(cfg->cfg, subcommand, out_dir, threads); });
}

nelsonir_status nelsonir_pair_potential(double e, double lambda, double r,
                                        double tau, double* out) {
  if (!out) return fail(NELSONIR_ERR_INVALID, "null output pointer");
  return guard([&] { *out = pair_potential(FormFactor::make(e, lambda), r, tau); });
}

nelsonir_status nelsonir_classical_minimizer(double e, double lambda, double r,
                                             double* out) {
  if (!out) return fail(NELSONIR_ERR_INVALID, "null output pointer");
  return guard(
      [&] { *out = classical_minimizer_closed(FormFactor::make(e, lambda), r); });
}

nelsonir_status nelsonir_van_hove(double e, double lambda, const char* ir,
                                  double kappa, double k_min, double k_max,
                                  int n_shells, int n_dirs, double qx, double qy,
                                  double qz, double* e0, double* n_mean) {
  if (!ir || !e0 || !n_mean) return fail(NELSONIR_ERR_INVALID, "null argument");
  return guard([&] {
    auto grid = ModeGrid::build(k_min, k_max, n_shells, n_dirs);
    auto vh = van_hove_oracle(grid, FormFactor::make(e, lambda),
                              InfraredProfile::make(ir_variant_from_string(ir), kappa),
                              Vec3(qx, qy, qz));
    *e0 = vh.E0;
    *n_mean = vh.N;
  });
}

}  // extern "C"
