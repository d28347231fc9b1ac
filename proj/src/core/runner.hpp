#ifndef NELSON_RUNNER_HPP
#define NELSON_RUNNER_HPP

// Experiment orchestration: dispatches a subcommand on a validated Config,
// writes CSV tables with commented key:value headers into an output
// directory, and records a manifest embedding the full config snapshot.

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"

namespace nelson {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunManifest {
  std::string subcommand;
  std::string version;
  std::string config_text;          // canonical snapshot, re-parseable
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> files;   // outputs relative to out_dir
  double wall_seconds = 0.0;

  std::string serialize() const;
  static RunManifest parse(const std::string& text);
};

// Subcommands: kernels, minimizer, particle, field, gibbs, overlap, fock,
// scan. threads > 0 caps the number of concurrent chains. Outputs are
// deterministic for fixed (config, seed); timings live only in the manifest.
RunManifest run(const Config& cfg, const std::string& subcommand,
                const std::string& out_dir, int threads = 0);

}  // namespace nelson

#endif
