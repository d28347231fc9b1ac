#include "core/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/field.hpp"
#include "core/fock.hpp"
#include "core/gibbs.hpp"
#include "core/kernels.hpp"
#include "core/model.hpp"
#include "core/particle.hpp"

namespace nelson {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Csv {
 public:
  Csv(const std::filesystem::path& dir, const std::string& name,
      const Config& cfg, const std::string& subcommand,
      const std::string& columns, RunManifest& man)
      : out_(dir / name) {
    if (!out_) throw std::runtime_error("cannot open output file " + name);
    out_ << "# subcommand: " << subcommand << "\n"
         << "# version: " << kArtifactVersion << "\n"
         << "# config_hash: " << hex64(cfg.hash()) << "\n"
         << "# seed: " << cfg.seed << "\n"
         << "# columns: " << columns << "\n";
    man.files.push_back(name);
  }

  template <typename... Ts>
  void row(Ts... vals) {
    bool first = true;
    (((out_ << (first ? "" : ","), first = false), cell(vals)), ...);
    out_ << "\n";
  }

 private:
  void cell(double v) { out_ << num(v); }
  void cell(int v) { out_ << v; }
  void cell(long v) { out_ << v; }
  void cell(const std::string& s) { out_ << s; }
  void cell(const char* s) { out_ << s; }

  std::ofstream out_;
};

GibbsConfig gibbs_config(const Config& cfg, double T, int threads) {
  GibbsConfig g;
  g.T = T;
  g.dt = cfg.dt;
  g.n_sweeps = cfg.n_sweeps;
  g.n_burn = cfg.n_burn;
  g.block_len = cfg.block_len;
  g.n_chains = threads > 0 ? std::min(cfg.n_chains, threads) : cfg.n_chains;
  g.thin = cfg.thin;
  g.seed = cfg.seed;
  g.k_probes = cfg.k_probes;
  g.st_probes = cfg.st_probes;
  return g;
}

ParticlePath origin_path(double T, double dt) {
  ParticlePath p;
  p.tg = TimeGrid::make(T, dt);
  p.q.assign(p.tg.size(), Vec3::Zero());
  return p;
}

void run_kernels(const Config& cfg, const std::filesystem::path& dir,
                 RunManifest& man) {
  auto ff = FormFactor::make(cfg.e, cfg.lambda);
  KernelCache cache;
  Csv csv(dir, "kernels.csv", cfg, "kernels", "r,tau,W,W_table", man);
  for (int i = 0; i <= 12; ++i) {
    for (int j = 0; j <= 12; ++j) {
      double r = 0.5 * i, tau = 0.5 * j;
      csv.row(r, tau, pair_potential(ff, r, tau), cache.w(ff, r, tau));
    }
  }
}

void run_minimizer(const Config& cfg, const std::filesystem::path& dir,
                   RunManifest& man) {
  auto ff = FormFactor::make(cfg.e, cfg.lambda);
  Csv csv(dir, "minimizer.csv", cfg, "minimizer",
          "r,xi_min,xi_closed,coulomb,tail_ratio", man);
  for (int i = 1; i <= 32; ++i) {
    double r = 0.25 * i;
    double xi = classical_minimizer(ff, r);
    double coul = -cfg.e / (4.0 * M_PI * r);
    csv.row(r, xi, classical_minimizer_closed(ff, r), coul,
            cfg.e == 0.0 ? 0.0 : xi / coul);
  }
}

void run_particle(const Config& cfg, const std::filesystem::path& dir,
                  RunManifest& man) {
  auto gs = solve_ground_state(cfg.make_potential(), cfg.R_max, cfg.n_grid);
  Csv psi(dir, "psi0.csv", cfg, "particle", "r,psi,cdf", man);
  int stride = std::max<int>(1, static_cast<int>(gs.r.size()) / 512);
  for (size_t i = 0; i < gs.r.size(); i += stride)
    psi.row(gs.r[i], gs.psi[i], gs.cdf[i]);

  auto tg = TimeGrid::make(cfg.T, cfg.dt);
  Csv paths(dir, "paths.csv", cfg, "particle", "chain,t,x,y,z", man);
  for (int c = 0; c < cfg.n_chains; ++c) {
    auto p = sample_path(gs, tg, cfg.seed + static_cast<std::uint64_t>(c));
    for (int i = 0; i < tg.size(); ++i)
      paths.row(c, tg.nodes[i], p.q[i].x(), p.q[i].y(), p.q[i].z());
  }
}

void run_field(const Config& cfg, const std::filesystem::path& dir,
               RunManifest& man) {
  auto ff = FormFactor::make(cfg.e, cfg.lambda);
  auto ir = InfraredProfile::make(cfg.ir_variant(), cfg.kappa);
  auto grid = ModeGrid::build(cfg.k_min, cfg.k_max, cfg.n_shells, cfg.n_dirs);
  auto path = origin_path(cfg.T, cfg.dt);

  Csv csv(dir, "dressing.csv", cfg, "field", "k,re_A,im_A,re_B,im_B", man);
  auto a = conditional_mean(path, grid, ir, ff, 0.0, DressingForm::A);
  auto b = conditional_mean(path, grid, ir, ff, 0.0, DressingForm::B);
  for (int j = 0; j < grid.size(); ++j) {
    csv.row(grid.modes[j].k.norm(), a.g_hat[j].real(), a.g_hat[j].imag(),
            b.g_hat[j].real(), b.g_hat[j].imag());
  }

  Csv fac(dir, "factorization.csv", cfg, "field", "amp,log_z,log_zeta,log_ratio",
          man);
  for (double amp : {0.3, 0.6, 0.9}) {
    ParticlePath p = path;
    for (int i = 0; i < p.tg.size(); ++i) {
      double t = p.tg.nodes[i];
      p.q[i] = amp * Vec3(std::sin(t), 0.3 * std::cos(2.0 * t),
                          0.2 * std::sin(0.5 * t));
    }
    auto pp = finite_mode_partition(p, grid, ff, ir);
    fac.row(amp, pp.log_z, pp.log_zeta, pp.log_ratio());
  }
}

struct GibbsRun {
  GroundStateSolution gs;
  PathEnsemble ens;
};

GibbsRun run_chains(const Config& cfg, double T, int threads,
                    const FormFactor& ff, const InfraredProfile& ir,
                    const ModeGrid& grid, const KernelCache& cache) {
  GibbsRun out{solve_ground_state(cfg.make_potential(), cfg.R_max, cfg.n_grid), {}};
  out.ens = mh_sample(gibbs_config(cfg, T, threads), out.gs, ff, ir, grid, cache);
  return out;
}

void run_gibbs(const Config& cfg, const std::filesystem::path& dir, int threads,
               RunManifest& man) {
  auto ff = FormFactor::make(cfg.e, cfg.lambda);
  auto ir = InfraredProfile::make(cfg.ir_variant(), cfg.kappa);
  auto grid = ModeGrid::build(cfg.k_min, cfg.k_max, cfg.n_shells, cfg.n_dirs);
  KernelCache cache;
  auto gr = run_chains(cfg, cfg.T, threads, ff, ir, grid, cache);
  const auto& ens = gr.ens;

  Csv summary(dir, "ensemble.csv", cfg, "gibbs",
              "n_chains,n_paths,accept_block,accept_end", man);
  summary.row(ens.n_chains, static_cast<long>(ens.paths.size()),
              ens.accept_block, ens.accept_end);

  auto dirs = direction_set(cfg.n_dirs);
  Csv mt(dir, "m_table.csv", cfg, "gibbs", "k,s,t,re_m,im_m,stderr", man);
  for (double k : cfg.k_probes) {
    for (const auto& [s, t] : cfg.st_probes) {
      std::complex<double> avg = 0.0;
      double err = 0.0;
      for (const auto& d : dirs) {
        auto est = estimate_mT(ens, ir, k * d, s, t);
        avg += est.value;
        err += est.stderr_;
      }
      avg /= static_cast<double>(dirs.size());
      err /= static_cast<double>(dirs.size());
      mt.row(k, s, t, avg.real(), avg.imag(), err);
    }
  }

  auto ratio = marginal_density_ratio(ens, gr.gs);
  auto rep = overlap_exponent(ens, ff, ir, grid, ratio.c_hat);
  std::ofstream diag(dir / "diagnostics.txt");
  diag << "# subcommand: gibbs\n# version: " << kArtifactVersion
       << "\n# config_hash: " << hex64(cfg.hash()) << "\n# seed: " << cfg.seed
       << "\n";
  diag << "D_T: " << num(rep.D_T) << "\n";
  diag << "D_T_stderr: " << num(rep.D_T_stderr) << "\n";
  diag << "lower_bound: " << num(rep.lower_bound) << "\n";
  diag << "c_hat: " << num(rep.c_hat) << "\n";
  diag << "c1_hat: " << num(rep.c1_hat) << "\n";
  diag << "A1_hat: " << num(rep.A1_hat) << "\n";
  diag << "A2_hat: " << num(rep.A2_hat) << "\n";
  diag << "accept_block: " << num(ens.accept_block) << "\n";
  diag << "accept_end: " << num(ens.accept_end) << "\n";
  man.files.push_back("diagnostics.txt");
}

void run_overlap(const Config& cfg, const std::filesystem::path& dir, int threads,
                 RunManifest& man) {
  auto ff = FormFactor::make(cfg.e, cfg.lambda);
  auto grid = ModeGrid::build(cfg.k_min, cfg.k_max, cfg.n_shells, cfg.n_dirs);
  KernelCache cache;
  Csv csv(dir, "overlap.csv", cfg, "overlap", "ir,T,D_T,stderr,lower_bound", man);
  for (auto v : {IrVariant::Zero, IrVariant::Unit}) {
    auto ir = InfraredProfile::make(v, cfg.kappa);
    for (double T : cfg.T_list) {
      auto gr = run_chains(cfg, T, threads, ff, ir, grid, cache);
      auto ratio = marginal_density_ratio(gr.ens, gr.gs);
      auto rep = overlap_exponent(gr.ens, ff, ir, grid, ratio.c_hat);
      csv.row(to_string(v), T, rep.D_T, rep.D_T_stderr, rep.lower_bound);
    }
  }
}

void run_fock(const Config& cfg, const std::filesystem::path& dir,
              RunManifest& man) {
  auto ff = FormFactor::make(cfg.e, cfg.lambda);
  auto ir = InfraredProfile::make(cfg.ir_variant(), cfg.kappa);
  BasisTemplate tmpl;
  tmpl.n_shells = cfg.fock_n_shells;
  tmpl.n_dirs = cfg.fock_n_dirs;
  tmpl.n_max = cfg.fock_n_max;
  tmpl.k_max = cfg.fock_k_max;
  tmpl.q0 = Vec3(cfg.q0_x, cfg.q0_y, cfg.q0_z);
  tmpl.n_sites = cfg.fock_n_sites;
  tmpl.spacing = cfg.fock_spacing;
  tmpl.R_max = cfg.fock_R_max;
  if (cfg.fock_dof == "static") tmpl.dof = ParticleDof::Static;
  else if (cfg.fock_dof == "grid1d") tmpl.dof = ParticleDof::Grid1D;
  else tmpl.dof = ParticleDof::RadialGrid;
  auto V = cfg.make_potential();
  bool with_v = tmpl.dof != ParticleDof::Static;

  auto rows = ir_scan(cfg.fock_k_mins, tmpl, ff, ir, with_v ? &V : nullptr);
  Csv csv(dir, "fock_scan.csv", cfg, "fock",
          "k_min,M,n_max,E0,gap,N_mean,vacuum_overlap,residual,ok", man);
  for (const auto& r : rows) {
    if (!r.ok) throw std::runtime_error("fock scan failed at k_min=" +
                                        num(r.k_min) + ": " + r.error);
    csv.row(r.k_min, r.M, r.n_max, r.E0, r.gap, r.N_mean, r.vacuum_overlap,
            r.residual, 1);
  }
}

void run_scan(const Config& cfg, const std::filesystem::path& dir,
              RunManifest& man) {
  // Deterministic overlap-exponent scan with the particle frozen at the
  // origin: the exact finite-T quadrature behind the MC estimator.
  auto ff = FormFactor::make(cfg.e, cfg.lambda);
  auto grid = ModeGrid::build(cfg.k_min, cfg.k_max, cfg.n_shells, cfg.n_dirs);
  Csv csv(dir, "scan.csv", cfg, "scan", "ir,T,D_det", man);
  for (auto v : {IrVariant::Zero, IrVariant::Unit}) {
    auto ir = InfraredProfile::make(v, cfg.kappa);
    for (double T : cfg.T_list) {
      auto path = origin_path(T, cfg.dt);
      csv.row(to_string(v), T, overlap_exponent_path(path, ff, ir, grid));
    }
  }
}

}  // namespace

std::string RunManifest::serialize() const {
  std::string out = "# nelsonir run manifest\n";
  out += "subcommand: " + subcommand + "\n";
  out += "version: " + version + "\n";
  out += "config_hash: " + hex64(config_hash) + "\n";
  out += "seed: " + std::to_string(seed) + "\n";
  out += "wall_seconds: " + num(wall_seconds) + "\n";
  out += "files:";
  for (const auto& f : files) out += " " + f;
  out += "\n" + config_text;
  return out;
}

RunManifest RunManifest::parse(const std::string& text) {
  RunManifest m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line == "[model]") {
      m.config_text = line + "\n";
      std::ostringstream rest;
      rest << in.rdbuf();
      m.config_text += rest.str();
      break;
    }
    if (line.empty() || line[0] == '#') continue;
    auto pos = line.find(": ");
    if (pos == std::string::npos) continue;
    std::string key = line.substr(0, pos), val = line.substr(pos + 2);
    if (key == "subcommand") m.subcommand = val;
    else if (key == "version") m.version = val;
    else if (key == "config_hash") m.config_hash = std::stoull(val, nullptr, 16);
    else if (key == "seed") m.seed = std::stoull(val);
    else if (key == "wall_seconds") m.wall_seconds = std::stod(val);
    else if (key == "files") {
      std::istringstream fs(val);
      std::string f;
      while (fs >> f) m.files.push_back(f);
    }
  }
  return m;
}

RunManifest run(const Config& cfg, const std::string& subcommand,
                const std::string& out_dir, int threads) {
  cfg.validate();
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  RunManifest man;
  man.subcommand = subcommand;
  man.version = kArtifactVersion;
  man.config_text = cfg.serialize();
  man.config_hash = cfg.hash();
  man.seed = cfg.seed;

  auto t0 = std::chrono::steady_clock::now();
  if (subcommand == "kernels") run_kernels(cfg, dir, man);
  else if (subcommand == "minimizer") run_minimizer(cfg, dir, man);
  else if (subcommand == "particle") run_particle(cfg, dir, man);
  else if (subcommand == "field") run_field(cfg, dir, man);
  else if (subcommand == "gibbs") run_gibbs(cfg, dir, threads, man);
  else if (subcommand == "overlap") run_overlap(cfg, dir, threads, man);
  else if (subcommand == "fock") run_fock(cfg, dir, man);
  else if (subcommand == "scan") run_scan(cfg, dir, man);
  else throw ValidationError("unknown subcommand '" + subcommand + "'");
  man.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ofstream mf(dir / "manifest.txt");
  mf << man.serialize();
  return man;
}

}  // namespace nelson
