#include "core/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace nelson {

void GibbsConfig::validate(double) const {
  if (!(T > 0.0) || !(dt > 0.0)) throw ValidationError("gibbs: T, dt must be > 0");
  if (n_burn >= n_sweeps) throw ValidationError("gibbs: n_burn < n_sweeps required");
  if (block_len < 2) throw ValidationError("gibbs: block_len >= 2 required");
  if (n_chains < 1 || thin < 1) throw ValidationError("gibbs: n_chains, thin >= 1");
  for (const auto& [s, t] : st_probes) {
    if (std::abs(s) > T || std::abs(t) > T)
      throw ValidationError("gibbs: (s,t) probes must lie inside [-T, T]");
  }
}

namespace {

// Incremental bookkeeping for A_T = sum_{i,j} w_i w_j W + boundary energy.
struct ActionWorkspace {
  const KernelCache* cache = nullptr;
  const FormFactor* ff = nullptr;
  const TimeGrid* tg = nullptr;
  const ModeGrid* grid = nullptr;
  bool active = false;    // e != 0
  bool boundary = false;  // and h not identically zero
  int n_dirs = 0;
  std::vector<std::vector<double>> bcoef;  // [node][radial shell]

  void init(const KernelCache& kc, const FormFactor& f, const InfraredProfile& ir,
            const ModeGrid& g, const TimeGrid& t) {
    cache = &kc;
    ff = &f;
    tg = &t;
    grid = &g;
    active = f.charge != 0.0;
    boundary = active && ir.variant != IrVariant::Zero;
    if (!boundary) return;
    const int nt = t.size();
    const int nk = static_cast<int>(g.radial_nodes.size());
    n_dirs = g.size() / nk;
    bcoef.assign(nt, std::vector<double>(nk));
    for (int j = 0; j < nk; ++j) {
      double k = g.radial_nodes[j];
      double rh = f.rho_hat(k);
      double pref = rh * rh * ir.h_hat(k) / (2.0 * k);
      for (int i = 0; i < nt; ++i) {
        double tail = (std::exp(-k * (t.T - t.nodes[i])) +
                       std::exp(-k * (t.T + t.nodes[i]))) / k;
        bcoef[i][j] = t.weights[i] * pref * tail;
      }
    }
  }

  double w(const Vec3& qi, const Vec3& qj, int i, int j) const {
    return cache->w(*ff, (qi - qj).norm(), tg->nodes[i] - tg->nodes[j]);
  }

  double bnode(int i, const Vec3& q) const {
    if (!boundary) return 0.0;
    double acc = 0.0;
    const int nk = static_cast<int>(bcoef[i].size());
    for (int j = 0; j < nk; ++j) {
      double cs = 0.0;
      for (int d = 0; d < n_dirs; ++d) {
        const auto& m = grid->modes[j * n_dirs + d];
        cs += m.w * std::cos(m.k.dot(q));
      }
      acc -= bcoef[i][j] * cs;
    }
    return acc;
  }

  double full(const std::vector<Vec3>& q) const {
    if (!active) return 0.0;
    const int nt = tg->size();
    double a = 0.0;
    for (int i = 0; i < nt; ++i) {
      a += tg->weights[i] * tg->weights[i] * w(q[i], q[i], i, i);
      for (int j = i + 1; j < nt; ++j)
        a += 2.0 * tg->weights[i] * tg->weights[j] * w(q[i], q[j], i, j);
      a += bnode(i, q[i]);
    }
    return a;
  }

  // Nodes a..b (inclusive) replaced by cand[a..b]; everything else unchanged.
  double delta(const std::vector<Vec3>& q, const std::vector<Vec3>& cand, int a,
               int b) const {
    if (!active) return 0.0;
    const int nt = tg->size();
    double d = 0.0;
    for (int i = a; i <= b; ++i) {
      const double wi = tg->weights[i];
      for (int j = 0; j < nt; ++j) {
        if (j >= a && j <= b) continue;
        d += 2.0 * wi * tg->weights[j] * (w(cand[i], q[j], i, j) - w(q[i], q[j], i, j));
      }
      for (int j = a; j <= b; ++j) {
        d += wi * tg->weights[j] * (w(cand[i], cand[j], i, j) - w(q[i], q[j], i, j));
      }
      d += bnode(i, cand[i]) - bnode(i, q[i]);
    }
    return d;
  }
};

struct ChainResult {
  std::vector<ParticlePath> paths;
  long block_acc = 0, block_tot = 0, end_acc = 0, end_tot = 0;
};

void run_chain(const GibbsConfig& cfg, const GroundStateSolution& gs,
               const ActionWorkspace& ws, const TimeGrid& tg, std::uint64_t seed,
               ChainResult& out) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const int nt = tg.size();
  const int L = std::min(cfg.block_len, nt - 2);
  auto init = sample_path(gs, tg, seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Vec3> q = init.q;
  std::vector<Vec3> cand = q;
  double action = ws.full(q);

  auto vterm = [&](int i, const Vec3& x) { return tg.weights[i] * gs.V(x.norm()); };

  long burn_acc = 0;
  for (int sweep = 0; sweep < cfg.n_sweeps; ++sweep) {
    const bool counted = sweep >= cfg.n_burn;

    // Brownian-bridge redraws of L interior nodes.
    int n_blocks = std::max(1, (nt - 2) / L);
    for (int rep = 0; rep < n_blocks; ++rep) {
      int a = static_cast<int>(unif(rng) * (nt - 1 - L));  // left anchor
      a = std::min(a, nt - 2 - L);
      int bfix = a + L + 1;  // right anchor
      std::copy(q.begin() + a, q.begin() + bfix + 1, cand.begin() + a);
      double dv = 0.0;
      for (int i = a + 1; i < bfix; ++i) {
        int n_rem = bfix - (i - 1);  // steps left to the anchor, current included
        const Vec3& x = cand[i - 1];
        Vec3 mean = x + (q[bfix] - x) / n_rem;
        double sd = std::sqrt(tg.dt * (n_rem - 1.0) / n_rem);
        cand[i] = mean + sd * Vec3(gauss(rng), gauss(rng), gauss(rng));
        dv += vterm(i, cand[i]) - vterm(i, q[i]);
      }
      double da = ws.delta(q, cand, a + 1, bfix - 1);
      if (std::log(unif(rng) + 1e-300) < -(dv + da)) {
        std::copy(cand.begin() + a + 1, cand.begin() + bfix, q.begin() + a + 1);
        action += da;
        if (counted) out.block_acc++;
        else burn_acc++;
      } else {
        std::copy(q.begin() + a + 1, q.begin() + bfix, cand.begin() + a + 1);
      }
      if (counted) out.block_tot++;
    }

    // Endpoint redraws from the Brownian step kernel, weighted by psi_0.
    for (int side = 0; side < 2; ++side) {
      int i = side == 0 ? 0 : nt - 1;
      int nb = side == 0 ? 1 : nt - 2;
      cand[i] = q[nb] + std::sqrt(tg.dt) * Vec3(gauss(rng), gauss(rng), gauss(rng));
      double pnew = gs.psi_at(cand[i].norm());
      if (pnew > 0.0) {
        double ratio = pnew / gs.psi_at(q[i].norm());
        double dv = vterm(i, cand[i]) - vterm(i, q[i]);
        double da = ws.delta(q, cand, i, i);
        if (std::log(unif(rng) + 1e-300) < std::log(ratio) - dv - da) {
          q[i] = cand[i];
          action += da;
          if (counted) out.end_acc++;
          else burn_acc++;
        }
      }
      cand[i] = q[i];
      if (counted) out.end_tot++;
    }

    if (sweep == cfg.n_burn - 1 && burn_acc == 0)
      throw std::runtime_error(
          "mh_sample: no accepted moves during burn-in; reduce block_len or dt");

    // Guard against silent drift of the incremental action.
    if (ws.active && (sweep + 1) % 1000 == 0) {
      double fresh = ws.full(q);
      if (std::abs(fresh - action) > 1e-8 * std::max(1.0, std::abs(fresh)))
        throw std::runtime_error("mh_sample: incremental action drifted");
      action = fresh;
    }

    if (counted && (sweep - cfg.n_burn) % cfg.thin == 0) {
      ParticlePath p;
      p.tg = tg;
      p.q = q;
      out.paths.push_back(std::move(p));
    }
  }
}

}  // namespace

double path_action(const ParticlePath& path, const KernelCache& cache,
                   const FormFactor& ff, const InfraredProfile& ir,
                   const ModeGrid& grid) {
  ActionWorkspace ws;
  ws.init(cache, ff, ir, grid, path.tg);
  return ws.full(path.q);
}

PathEnsemble mh_sample(const GibbsConfig& cfg, const GroundStateSolution& gs,
                       const FormFactor& ff, const InfraredProfile& ir,
                       const ModeGrid& grid, const KernelCache& cache) {
  cfg.validate();
  TimeGrid tg = TimeGrid::make(cfg.T, cfg.dt);
  ActionWorkspace ws;
  ws.init(cache, ff, ir, grid, tg);

  std::vector<ChainResult> results(cfg.n_chains);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(cfg.n_chains);
  for (int c = 0; c < cfg.n_chains; ++c) {
    threads.emplace_back([&, c] {
      try {
        run_chain(cfg, gs, ws, tg, cfg.seed * 1000003ULL + c, results[c]);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  PathEnsemble ens;
  ens.tg = tg;
  ens.n_chains = cfg.n_chains;
  long ba = 0, bt = 0, ea = 0, et = 0;
  for (auto& r : results) {
    ba += r.block_acc;
    bt += r.block_tot;
    ea += r.end_acc;
    et += r.end_tot;
    for (auto& p : r.paths) ens.paths.push_back(std::move(p));
  }
  ens.accept_block = bt ? static_cast<double>(ba) / bt : 0.0;
  ens.accept_end = et ? static_cast<double>(ea) / et : 0.0;
  return ens;
}

namespace {

int grid_index(const TimeGrid& tg, double t) {
  int i = static_cast<int>(std::lround((t + tg.T) / tg.dt));
  if (i < 0 || i >= tg.size() || std::abs(tg.nodes[i] - t) > 1e-9)
    throw ValidationError("time probe is not a grid node");
  return i;
}

}  // namespace

MEstimate estimate_mT(const PathEnsemble& ens, const InfraredProfile& ir,
                      const Vec3& k, double s, double t) {
  const int is = grid_index(ens.tg, s);
  const int it = grid_index(ens.tg, t);
  const double hh = ir.h_hat(k.norm());
  const long n = static_cast<long>(ens.paths.size());
  if (n == 0) throw ValidationError("estimate_mT: empty ensemble");

  const int nb = 20;
  std::vector<std::complex<double>> batch(nb, 0.0);
  std::vector<long> cnt(nb, 0);
  for (long p = 0; p < n; ++p) {
    double pt = k.dot(ens.paths[p].q[it]);
    double ps = k.dot(ens.paths[p].q[is]);
    auto v = (std::complex<double>(std::cos(pt), std::sin(pt)) - hh) *
             (std::complex<double>(std::cos(ps), -std::sin(ps)) - hh);
    int b = static_cast<int>(p * nb / n);
    batch[b] += v;
    cnt[b]++;
  }
  MEstimate est;
  std::complex<double> mean(0.0, 0.0);
  for (int b = 0; b < nb; ++b) {
    if (cnt[b]) batch[b] /= static_cast<double>(cnt[b]);
    mean += batch[b];
  }
  mean /= static_cast<double>(nb);
  double var = 0.0;
  for (int b = 0; b < nb; ++b) var += std::norm(batch[b] - mean) / (nb - 1);
  est.value = mean;
  est.stderr_ = std::sqrt(var / nb);
  est.low_samples = n < 2 * nb;

  double c1 = (1.0 + ir.sup()) * (1.0 + ir.sup());
  if (std::abs(est.value) > c1 + 1e-9)
    throw std::logic_error("estimate_mT: uniform bound violated");
  return est;
}

namespace {

// Per-path infrared functional, accumulated per radial shell:
// shell_out[j] += avg over directions of |u(k)|^2.
double d_of_path(const ParticlePath& path, const FormFactor& ff,
                 const InfraredProfile& ir, const ModeGrid& grid,
                 std::vector<double>* shell_out) {
  const TimeGrid& tg = path.tg;
  const int nk = static_cast<int>(grid.radial_nodes.size());
  const int n_dirs = grid.size() / nk;
  double d = 0.0;
  for (int j = 0; j < nk; ++j) {
    const double k = grid.radial_nodes[j];
    const double rh = ff.rho_hat(k);
    const double hh = ir.h_hat(k);
    std::vector<double> decay(tg.size());
    for (int i = 0; i < tg.size(); ++i)
      decay[i] = tg.weights[i] * std::exp(-k * std::abs(tg.nodes[i]));
    double shell = 0.0;
    for (int dd = 0; dd < n_dirs; ++dd) {
      const auto& m = grid.modes[j * n_dirs + dd];
      std::complex<double> u(0.0, 0.0);
      for (int i = 0; i < tg.size(); ++i) {
        double ph = m.k.dot(path.q[i]);
        u += decay[i] * (std::complex<double>(std::cos(ph), std::sin(ph)) - hh);
      }
      d += m.w * rh * rh / k * std::norm(u);
      shell += std::norm(u) / n_dirs;
    }
    if (shell_out) (*shell_out)[j] += shell;
  }
  return d;
}

}  // namespace

double overlap_exponent_path(const ParticlePath& path, const FormFactor& ff,
                             const InfraredProfile& ir, const ModeGrid& grid) {
  return d_of_path(path, ff, ir, grid, nullptr);
}

DiagnosticsReport overlap_exponent(const PathEnsemble& ens, const FormFactor& ff,
                                   const InfraredProfile& ir, const ModeGrid& grid,
                                   double c_hat) {
  const long n = static_cast<long>(ens.paths.size());
  if (n == 0) throw ValidationError("overlap_exponent: empty ensemble");
  const int nk = static_cast<int>(grid.radial_nodes.size());

  const int nb = 20;
  std::vector<double> batch(nb, 0.0);
  std::vector<long> cnt(nb, 0);
  std::vector<double> shells(nk, 0.0);
  for (long p = 0; p < n; ++p) {
    int b = static_cast<int>(p * nb / n);
    batch[b] += d_of_path(ens.paths[p], ff, ir, grid, &shells);
    cnt[b]++;
  }
  DiagnosticsReport rep;
  double mean = 0.0;
  for (int b = 0; b < nb; ++b) {
    if (cnt[b]) batch[b] /= static_cast<double>(cnt[b]);
    mean += batch[b] / nb;
  }
  double var = 0.0;
  for (int b = 0; b < nb; ++b) var += (batch[b] - mean) * (batch[b] - mean) / (nb - 1);
  rep.D_T = mean;
  rep.D_T_stderr = std::sqrt(var / nb);
  rep.c_hat = c_hat;
  rep.c1_hat = (1.0 + ir.sup()) * (1.0 + ir.sup());
  rep.lower_bound = std::exp(-c_hat * rep.D_T / 8.0) / std::sqrt(c_hat);

  // Least-squares fit of the angular-averaged time functional to A1/k + A2.
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (int j = 0; j < nk; ++j) {
    double x = 1.0 / grid.radial_nodes[j];
    double y = shells[j] / n;
    s11 += x * x;
    s12 += x;
    s22 += 1.0;
    b1 += x * y;
    b2 += y;
  }
  double det = s11 * s22 - s12 * s12;
  if (std::abs(det) > 1e-14) {
    rep.A1_hat = (b1 * s22 - b2 * s12) / det;
    rep.A2_hat = (s11 * b2 - s12 * b1) / det;
  }
  return rep;
}

DensityRatio marginal_density_ratio(const PathEnsemble& ens,
                                    const GroundStateSolution& gs, int n_bins,
                                    long min_count) {
  const long n = static_cast<long>(ens.paths.size());
  if (n == 0) throw ValidationError("marginal_density_ratio: empty ensemble");
  int i0 = grid_index(ens.tg, 0.0);

  double r_hi = gs.cdf_inverse(0.999);
  std::vector<long> counts(n_bins, 0);
  for (const auto& p : ens.paths) {
    double r = p.q[i0].norm();
    int b = static_cast<int>(r / r_hi * n_bins);
    if (b >= 0 && b < n_bins) counts[b]++;
  }
  DensityRatio out;
  out.bin_edges.resize(n_bins + 1);
  for (int b = 0; b <= n_bins; ++b) out.bin_edges[b] = r_hi * b / n_bins;
  for (int b = 0; b < n_bins; ++b) {
    if (counts[b] < min_count) continue;  // starved bins are excluded
    double ref = gs.cdf_at(out.bin_edges[b + 1]) - gs.cdf_at(out.bin_edges[b]);
    if (ref <= 0.0) continue;
    double ratio = (static_cast<double>(counts[b]) / n) / ref;
    out.ratio.push_back(ratio);
    out.counts.push_back(counts[b]);
    out.c_hat = std::max(out.c_hat, std::max(ratio, 1.0 / ratio));
  }
  return out;
}

double two_time_density_sup(const PathEnsemble& ens, const GroundStateSolution& gs,
                            double s, double t, int n_bins, long min_count) {
  const long n = static_cast<long>(ens.paths.size());
  if (n == 0) throw ValidationError("two_time_density_sup: empty ensemble");
  int is = grid_index(ens.tg, s), it = grid_index(ens.tg, t);
  double r_hi = gs.cdf_inverse(0.995);

  std::vector<long> counts(static_cast<size_t>(n_bins) * n_bins, 0);
  for (const auto& p : ens.paths) {
    int bs = static_cast<int>(p.q[is].norm() / r_hi * n_bins);
    int bt = static_cast<int>(p.q[it].norm() / r_hi * n_bins);
    if (bs >= 0 && bs < n_bins && bt >= 0 && bt < n_bins) counts[bs * n_bins + bt]++;
  }
  double sup = 0.0;
  for (int bs = 0; bs < n_bins; ++bs) {
    double ps = gs.cdf_at(r_hi * (bs + 1.0) / n_bins) - gs.cdf_at(r_hi * bs / n_bins);
    for (int bt = 0; bt < n_bins; ++bt) {
      long c = counts[bs * n_bins + bt];
      if (c < min_count) continue;
      double pt = gs.cdf_at(r_hi * (bt + 1.0) / n_bins) - gs.cdf_at(r_hi * bt / n_bins);
      if (ps * pt > 0.0) sup = std::max(sup, (static_cast<double>(c) / n) / (ps * pt));
    }
  }
  return sup;
}

}  // namespace nelson
