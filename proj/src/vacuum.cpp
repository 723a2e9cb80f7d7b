#include "vacuum.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <thread>

namespace ncaf {

static uint64_t sm64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t mix_key(uint64_t seed, uint64_t case_idx, uint64_t point_idx, uint64_t restart_idx) {
  uint64_t x = sm64(seed + 0x9e3779b97f4a7c15ull);
  x = sm64(x ^ (case_idx + 0x3c6ef372fe94f82bull));
  x = sm64(x ^ (point_idx + 0x78dde6e5fd29f05bull));
  x = sm64(x ^ (restart_idx + 0xf1bbcdcbfa53e0abull));
  return x;
}

double uniform_pm(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  const uint64_t r = sm64(state);
  return 2.0 * (double(r >> 11) * 0x1.0p-53) - 1.0;
}

FactorEngine::FactorEngine(const Frame& frame, int k) {
  nj_ = frame.count(k);
  ic_ = frame.inherited_count[k];
  m_ = frame.shape.dims[k];
  basis_ = frame.dirs[k];
  const StructConst& C = frame.C[k];
  by_mid_.resize(nj_);
  for (int a = 0; a < nj_; ++a)
    for (int b = 0; b < nj_; ++b)
      for (int c = 0; c < nj_; ++c) {
        const double v = C.at(a, b, c);
        if (std::abs(v) > 1e-12) {
          nz_.push_back({a, b, c, v});
          by_mid_[b].push_back({a, b, c, v});
        }
      }
}

double FactorEngine::value(const Eigen::MatrixXd& b) const {
  const int nj = nj_;
  std::vector<Eigen::MatrixXd> W(nj, Eigen::MatrixXd::Zero(nj, nj));
  for (const Entry& e : nz_) {
    const auto col = b.col(e.b);
    for (int l = 0; l < nj; ++l) W[l](e.a, e.c) += e.v * col(l);
  }
  const auto bsl = b.leftCols(nj);
  double v = 0;
  Eigen::MatrixXd om(nj, nj + 1);
  for (int l = 0; l < nj; ++l) {
    om.setZero();
    for (const Entry& e : by_mid_[l]) om.row(e.a) += e.v * b.row(e.c);
    om.leftCols(nj) -= bsl * W[l];
    v += om.squaredNorm();
  }
  return 0.5 * v;
}

double FactorEngine::value_grad(const Eigen::MatrixXd& b, Eigen::MatrixXd& g_free) const {
  const int nj = nj_, nc = nj_ + 1;
  std::vector<Eigen::MatrixXd> W(nj, Eigen::MatrixXd::Zero(nj, nj));
  for (const Entry& e : nz_) {
    const auto col = b.col(e.b);
    for (int l = 0; l < nj; ++l) W[l](e.a, e.c) += e.v * col(l);
  }
  const auto bsl = b.leftCols(nj);
  std::vector<Eigen::MatrixXd> om(nj);
  double v = 0;
  for (int l = 0; l < nj; ++l) {
    om[l].setZero(nj, nc);
    for (const Entry& e : by_mid_[l]) om[l].row(e.a) += e.v * b.row(e.c);
    om[l].leftCols(nj) -= bsl * W[l];
    v += om[l].squaredNorm();
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nj, nc);
  for (const Entry& e : nz_) g.row(e.c) += e.v * om[e.b].row(e.a);
  for (int l = 0; l < nj; ++l)
    g.leftCols(nj) -= 2.0 * (om[l].leftCols(nj) * W[l].transpose());
  g_free = g.bottomRows(nj - ic_);
  return 0.5 * v;
}

Eigen::MatrixXd FactorEngine::assemble(const Eigen::MatrixXd& inherited_rows,
                                       const Eigen::VectorXd& free_flat) const {
  Eigen::MatrixXd b(nj_, nj_ + 1);
  b.topRows(ic_) = inherited_rows;
  b.bottomRows(nj_ - ic_) =
      Eigen::Map<const Eigen::MatrixXd>(free_flat.data(), nj_ - ic_, nj_ + 1);
  return b;
}

Eigen::VectorXd FactorEngine::free_of(const Eigen::MatrixXd& b) const {
  const Eigen::MatrixXd f = b.bottomRows(nj_ - ic_);
  return Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
}

ConnectionConfig FactorEngine::to_config(const Eigen::MatrixXd& b, const Frame& frame,
                                         int k) const {
  ConnectionConfig conn = ConnectionConfig::zero(frame);
  const double tn = 1.0 / std::sqrt(double(m_));
  for (int mu = 0; mu < nj_; ++mu) {
    Mat x = Mat::Zero(m_, m_);
    for (int lam = 0; lam < nj_; ++lam)
      if (b(mu, lam) != 0.0) x += b(mu, lam) * basis_[lam];
    x += b(mu, nj_) * tn * cplx(0, 1) * Mat::Identity(m_, m_);
    conn.B[k][mu] = std::move(x);
    conn.frozen[k][mu] = mu < ic_ ? 1 : 0;
  }
  return conn;
}

Eigen::MatrixXd FactorEngine::coords_of(const ConnectionConfig& conn, int k) const {
  Eigen::MatrixXd b(nj_, nj_ + 1);
  const double tn = 1.0 / std::sqrt(double(m_));
  for (int mu = 0; mu < nj_; ++mu) {
    for (int lam = 0; lam < nj_; ++lam)
      b(mu, lam) = (basis_[lam].adjoint() * conn.B[k][mu]).trace().real();
    b(mu, nj_) = conn.B[k][mu].trace().imag() * tn;
  }
  return b;
}

MinimizeResult lbfgs_minimize(const FactorEngine& eng, const Eigen::MatrixXd& inherited_rows,
                              const Eigen::VectorXd& start, const MinimizerConfig& mcfg) {
  const int dim = static_cast<int>(start.size());
  Eigen::VectorXd x = start;
  Eigen::MatrixXd gm;
  double f = eng.value_grad(eng.assemble(inherited_rows, x), gm);
  Eigen::VectorXd g = Eigen::Map<Eigen::VectorXd>(gm.data(), dim);

  const int mem = 8;
  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;
  MinimizeResult res;
  int it = 0;
  for (; it < mcfg.maxiter; ++it) {
    if (g.norm() <= mcfg.gtol) break;

    // Two-loop recursion for the search direction.
    Eigen::VectorXd q = g;
    const int h = static_cast<int>(S.size());
    std::vector<double> alpha(h);
    for (int i = h - 1; i >= 0; --i) {
      alpha[i] = rho[i] * S[i].dot(q);
      q -= alpha[i] * Y[i];
    }
    if (h > 0) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (int i = 0; i < h; ++i) {
      const double beta = rho[i] * Y[i].dot(q);
      q += (alpha[i] - beta) * S[i];
    }
    Eigen::VectorXd p = -q;
    double gp = g.dot(p);
    if (gp >= 0) {
      S.clear();
      Y.clear();
      rho.clear();
      p = -g;
      gp = -g.squaredNorm();
    }

    double a = (it == 0 && S.empty()) ? std::min(1.0, 1.0 / std::max(1e-12, g.norm())) : 1.0;
    double fn = f;
    Eigen::VectorXd xn;
    bool ok = false;
    for (int bt = 0; bt < 80; ++bt) {
      xn = x + a * p;
      fn = eng.value(eng.assemble(inherited_rows, xn));
      if (fn <= f + 1e-4 * a * gp) {
        ok = true;
        break;
      }
      a *= 0.5;
    }
    if (!ok || std::abs(a * gp) < 1e-18 * (1.0 + std::abs(f))) {
      if (!S.empty()) {
        S.clear();
        Y.clear();
        rho.clear();
        continue;  // retry from steepest descent
      }
      break;  // line search stalled
    }

    Eigen::MatrixXd gm2;
    const double f2 = eng.value_grad(eng.assemble(inherited_rows, xn), gm2);
    Eigen::VectorXd g2 = Eigen::Map<Eigen::VectorXd>(gm2.data(), dim);
    Eigen::VectorXd s = xn - x, y = g2 - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > mem) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    x = std::move(xn);
    f = f2;
    g = std::move(g2);
  }
  res.vmin = f;
  res.converged = g.norm() <= mcfg.gtol;
  res.iterations = it;
  res.coords = eng.assemble(inherited_rows, x);
  return res;
}

Eigen::MatrixXd inherited_rows_at(const AdaptedBasis& adapted, int k,
                                  const Eigen::VectorXd& lambda) {
  const int nj = adapted.frame.count(k);
  const int ic = adapted.inherited_count(k);
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(ic, nj + 1);
  for (int p = 0; p < ic; ++p)
    rows(p, p) = lambda(adapted.inherited_index[k][p].i);
  return rows;
}

// One factor's best-of-starts minimization; start list order fixes ties.
struct FactorBest {
  double vmin = 0;
  bool converged = false;
  Eigen::MatrixXd coords;
};

static FactorBest best_of_starts(const FactorEngine& eng, const Eigen::MatrixXd& inh,
                                 const std::vector<Eigen::VectorXd>& starts,
                                 const MinimizerConfig& mcfg) {
  std::vector<MinimizeResult> results(starts.size());
  auto run = [&](size_t i) { results[i] = lbfgs_minimize(eng, inh, starts[i], mcfg); };
  const int nt = std::min<int>(mcfg.threads, static_cast<int>(starts.size()));
  if (nt > 1) {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < starts.size(); i = next.fetch_add(1)) run(i);
      });
    for (auto& th : pool) th.join();
  } else {
    for (size_t i = 0; i < starts.size(); ++i) run(i);
  }
  size_t best = 0;
  for (size_t i = 1; i < results.size(); ++i)
    if (results[i].vmin < results[best].vmin) best = i;
  return {results[best].vmin, results[best].converged, results[best].coords};
}

static ConnectionConfig config_of_coords(const AdaptedBasis& adapted,
                                         const std::vector<FactorEngine>& engines,
                                         const std::vector<Eigen::MatrixXd>& coords) {
  ConnectionConfig conn = ConnectionConfig::zero(adapted.frame);
  for (size_t k = 0; k < engines.size(); ++k) {
    ConnectionConfig part = engines[k].to_config(coords[k], adapted.frame, static_cast<int>(k));
    conn.B[k] = std::move(part.B[k]);
    conn.frozen[k] = part.frozen[k];
  }
  return conn;
}

static std::vector<FactorEngine> engines_of(const AdaptedBasis& adapted) {
  std::vector<FactorEngine> engines;
  for (int k = 0; k < adapted.frame.shape.factors(); ++k)
    engines.emplace_back(adapted.frame, k);
  return engines;
}

static PointResult minimize_point_impl(const AdaptedBasis& adapted,
                                       const std::vector<FactorEngine>& engines,
                                       const Eigen::VectorXd& lambda,
                                       const MinimizerConfig& mcfg, uint64_t seed,
                                       uint64_t case_idx, uint64_t point_idx, int n_random,
                                       bool vary_scale,
                                       const std::vector<std::vector<Eigen::MatrixXd>>* warm) {
  PointResult pr;
  pr.lambda = lambda;
  pr.converged = true;
  const int nf = adapted.frame.shape.factors();
  for (int k = 0; k < nf; ++k) {
    const FactorEngine& eng = engines[k];
    const Eigen::MatrixXd inh = inherited_rows_at(adapted, k, lambda);
    const int ic = eng.inherited();
    std::vector<Eigen::VectorXd> starts;
    if (warm)
      for (const auto& w : *warm) starts.push_back(eng.free_of(w[k]));
    starts.push_back(Eigen::VectorXd::Zero(eng.free_rows() * eng.cols()));
    {
      Eigen::MatrixXd bfree = Eigen::MatrixXd::Zero(eng.free_rows(), eng.cols());
      for (int mu = ic; mu < eng.dirs(); ++mu) bfree(mu - ic, mu) = 1.0;
      starts.push_back(Eigen::Map<Eigen::VectorXd>(bfree.data(), bfree.size()));
    }
    static const double scale_cycle[3] = {0.5, 1.0, 2.0};
    for (int j = 0; j < n_random; ++j) {
      const double sc = mcfg.scale * (vary_scale ? scale_cycle[j % 3] : 1.0);
      uint64_t st = mix_key(seed, case_idx, point_idx, uint64_t(j) * nf + k);
      Eigen::VectorXd r(eng.free_rows() * eng.cols());
      for (int t = 0; t < r.size(); ++t) r(t) = sc * uniform_pm(st);
      starts.push_back(std::move(r));
    }
    FactorBest fb = best_of_starts(eng, inh, starts, mcfg);
    pr.vmin += fb.vmin;
    pr.converged = pr.converged && fb.converged;
    pr.coords.push_back(std::move(fb.coords));
  }
  ConnectionConfig conn = config_of_coords(adapted, engines, pr.coords);
  pr.lines = mass_spectrum(conn).lines;
  return pr;
}

PointResult minimize_point(const AdaptedBasis& adapted, const Eigen::VectorXd& lambda,
                           const MinimizerConfig& mcfg, uint64_t seed, uint64_t case_idx,
                           uint64_t point_idx, int n_random, bool vary_scale,
                           const std::vector<std::vector<Eigen::MatrixXd>>* warm_list) {
  return minimize_point_impl(adapted, engines_of(adapted), lambda, mcfg, seed, case_idx,
                             point_idx, n_random, vary_scale, warm_list);
}

PointResult minimize(const AdaptedBasis& adapted, const Eigen::VectorXd& lambda,
                     const MinimizerConfig& mcfg, uint64_t seed) {
  return minimize_point(adapted, lambda, mcfg, seed, 0, 0,
                        std::max(0, mcfg.restarts - 2), false, nullptr);
}

Eigen::VectorXd lambda_at(const SweepSpec& spec, const AdaptedBasis& adapted, int idx,
                          int idx2) {
  const int r = adapted.step.shapeA.factors();
  const double h = spec.samples > 1 ? (spec.hi - spec.lo) / (spec.samples - 1) : 0.0;
  const double t = spec.lo + idx * h;
  Eigen::VectorXd lam(r);
  switch (spec.kind) {
    case PathKind::diagonal:
      lam.setConstant(t);
      break;
    case PathKind::antidiagonal:
      if (r != 2) throw std::invalid_argument("anti-diagonal paths need two source factors");
      lam(0) = t;
      lam(1) = spec.offset - t;
      break;
    case PathKind::grid:
      if (r != 2) throw std::invalid_argument("grid paths need two source factors");
      lam(0) = t;
      lam(1) = spec.lo + idx2 * h;
      break;
  }
  return lam;
}

static int sweep_randoms(const MinimizerConfig& mcfg) {
  return std::clamp(mcfg.restarts / 8, 2, 8);
}

SweepResult sweep(const AdaptedBasis& adapted, const SweepSpec& spec,
                  const MinimizerConfig& mcfg, uint64_t case_idx) {
  if (spec.samples < 2) throw std::invalid_argument("sweeps need at least two samples");
  const std::vector<FactorEngine> engines = engines_of(adapted);
  const int nr = sweep_randoms(mcfg);
  SweepResult out;

  if (spec.kind == PathKind::grid) {
    for (int i = 0; i < spec.samples; ++i) {
      std::vector<std::vector<Eigen::MatrixXd>> warm;
      for (int j = 0; j < spec.samples; ++j) {
        const Eigen::VectorXd lam = lambda_at(spec, adapted, i, j);
        const uint64_t pid = uint64_t(i) * spec.samples + j;
        PointResult pr = minimize_point_impl(adapted, engines, lam, mcfg, spec.seed,
                                             case_idx, pid, nr, true,
                                             (mcfg.warm_start && !warm.empty()) ? &warm : nullptr);
        warm.assign(1, pr.coords);
        out.points.push_back(std::move(pr));
      }
    }
    return out;
  }

  // Forward pass with warm starts.
  std::vector<std::vector<Eigen::MatrixXd>> warm;
  for (int i = 0; i < spec.samples; ++i) {
    const Eigen::VectorXd lam = lambda_at(spec, adapted, i);
    PointResult pr = minimize_point_impl(adapted, engines, lam, mcfg, spec.seed, case_idx,
                                         uint64_t(i), nr, true,
                                         (mcfg.warm_start && !warm.empty()) ? &warm : nullptr);
    warm.assign(1, pr.coords);
    out.points.push_back(std::move(pr));
  }
  if (!mcfg.warm_start) return out;

  // Backward pass: offer each point its right neighbour's minimizer.
  for (int i = spec.samples - 2; i >= 0; --i) {
    PointResult& cur = out.points[i];
    const PointResult& nxt = out.points[i + 1];
    bool improved = false;
    double vsum = 0;
    std::vector<Eigen::MatrixXd> coords;
    bool conv = true;
    for (size_t k = 0; k < engines.size(); ++k) {
      const Eigen::MatrixXd inh = inherited_rows_at(adapted, static_cast<int>(k), cur.lambda);
      MinimizeResult mr =
          lbfgs_minimize(engines[k], inh, engines[k].free_of(nxt.coords[k]), mcfg);
      vsum += mr.vmin;
      conv = conv && mr.converged;
      coords.push_back(std::move(mr.coords));
    }
    if (vsum < cur.vmin) {
      cur.vmin = vsum;
      cur.converged = conv;
      cur.coords = std::move(coords);
      improved = true;
    }
    if (improved) {
      ConnectionConfig conn = config_of_coords(adapted, engines, cur.coords);
      cur.lines = mass_spectrum(conn).lines;
    }
  }
  return out;
}

bool spectra_jumped(const std::vector<MassLine>& s1, const std::vector<MassLine>& s2,
                    double tol) {
  auto collect = [](const std::vector<MassLine>& s) {
    std::vector<std::pair<std::string, std::vector<double>>> by;
    for (const MassLine& l : s) {
      auto it = std::find_if(by.begin(), by.end(),
                             [&](const auto& p) { return p.first == l.label; });
      if (it == by.end()) {
        by.push_back({l.label, {l.mass}});
      } else {
        it->second.push_back(l.mass);
      }
    }
    for (auto& p : by) std::sort(p.second.begin(), p.second.end());
    std::sort(by.begin(), by.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return by;
  };
  const auto a = collect(s1), b = collect(s2);
  if (a.size() != b.size()) return true;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || a[i].second.size() != b[i].second.size()) return true;
    for (size_t j = 0; j < a[i].second.size(); ++j)
      if (std::abs(a[i].second[j] - b[i].second[j]) > tol) return true;
  }
  return false;
}

std::vector<double> detect_discontinuities(const AdaptedBasis& adapted,
                                           const SweepResult& result, const SweepSpec& spec,
                                           const MinimizerConfig& mcfg, uint64_t case_idx) {
  if (spec.kind == PathKind::grid)
    throw std::invalid_argument("discontinuity detection needs a 1D path");
  const std::vector<FactorEngine> engines = engines_of(adapted);
  const double h = (spec.hi - spec.lo) / (spec.samples - 1);
  std::vector<double> events;
  uint64_t mid_counter = 1u << 20;

  auto point_at = [&](double t, const PointResult& a, const PointResult& b) {
    Eigen::VectorXd lam(adapted.step.shapeA.factors());
    if (spec.kind == PathKind::diagonal) {
      lam.setConstant(t);
    } else {
      lam(0) = t;
      lam(1) = spec.offset - t;
    }
    std::vector<std::vector<Eigen::MatrixXd>> warm = {a.coords, b.coords};
    return minimize_point_impl(adapted, engines, lam, mcfg, spec.seed, case_idx,
                               mid_counter++, sweep_randoms(mcfg), true, &warm);
  };

  for (int i = 0; i + 1 < spec.samples; ++i) {
    if (!spectra_jumped(result.points[i].lines, result.points[i + 1].lines)) continue;
    double lo = spec.lo + i * h, hi = lo + h;
    PointResult plo = result.points[i], phi = result.points[i + 1];
    while (hi - lo > 1e-3) {
      const double mid = 0.5 * (lo + hi);
      PointResult pm = point_at(mid, plo, phi);
      if (spectra_jumped(plo.lines, pm.lines)) {
        hi = mid;
        phi = std::move(pm);
      } else {
        lo = mid;
        plo = std::move(pm);
      }
    }
    if (spectra_jumped(plo.lines, phi.lines)) events.push_back(0.5 * (lo + hi));
  }
  std::sort(events.begin(), events.end());
  std::vector<double> dedup;
  for (double e : events)
    if (dedup.empty() || e - dedup.back() > 2e-3) dedup.push_back(e);
  return dedup;
}

const std::vector<CaseDef>& builtin_cases() {
  static const std::vector<CaseDef> cases = {
      {"M2+M3->M5", {2, 3}, 5},
      {"M2+M2->M4", {2, 2}, 4},
      {"M2->M3", {2}, 3},
      {"M2+M2->M5", {2, 2}, 5},
  };
  return cases;
}

BratteliStep case_step(const CaseDef& c) {
  Eigen::MatrixXi mult(1, static_cast<int>(c.ns.size()));
  mult.setOnes();
  return make_step(AlgebraShape(c.ns), AlgebraShape({c.m}), mult);
}

std::vector<TableRow> run_table(const MinimizerConfig& mcfg, uint64_t seed) {
  std::vector<TableRow> rows;
  const auto& cases = builtin_cases();
  for (size_t ci = 0; ci < cases.size(); ++ci) {
    const CaseDef& c = cases[ci];
    const BratteliStep step = case_step(c);
    const GeneratorBasis basisA = build_basis(step.shapeA);
    const AdaptedBasis adapted = adapted_basis(step, basisA);
    SweepSpec spec;
    spec.kind = PathKind::diagonal;
    spec.lo = 0.0;
    spec.hi = 3.0;
    spec.samples = 601;
    spec.seed = seed;
    SweepResult sr = sweep(adapted, spec, mcfg, ci);
    std::vector<double> ev = detect_discontinuities(adapted, sr, spec, mcfg, ci);
    TableRow row;
    row.name = c.name;
    row.n_idof = adapted.inherited_count(0);
    row.n_ndof = adapted.complement_count(0);
    row.r_dof = double(row.n_ndof) / double(row.n_idof);
    if (!ev.empty()) row.lambda_first = ev[0];
    if (ev.size() > 1) row.lambda_second = ev[1];
    for (const PointResult& p : sr.points) row.converged = row.converged && p.converged;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ncaf
