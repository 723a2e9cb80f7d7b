#include "ncgft.h"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ncaf {

ConnectionConfig ConnectionConfig::zero(const Frame& frame) {
  ConnectionConfig c;
  c.frame = frame;
  for (int k = 0; k < frame.shape.factors(); ++k) {
    const int m = frame.shape.dims[k];
    c.B.emplace_back(frame.count(k), Mat::Zero(m, m));
    c.frozen.emplace_back(frame.count(k), 0);
  }
  return c;
}

ConnectionConfig ConnectionConfig::basis(const Frame& frame) {
  ConnectionConfig c = zero(frame);
  for (int k = 0; k < frame.shape.factors(); ++k)
    for (int b = 0; b < frame.count(k); ++b) c.B[k][b] = frame.dirs[k][b];
  return c;
}

void validate_connection(const ConnectionConfig& conn, double tol) {
  const Frame& f = conn.frame;
  if (static_cast<int>(conn.B.size()) != f.shape.factors())
    throw shape_error("field list must cover every factor");
  for (int k = 0; k < f.shape.factors(); ++k) {
    if (static_cast<int>(conn.B[k].size()) != f.count(k) ||
        conn.frozen[k].size() != conn.B[k].size())
      throw shape_error("one field and one mask entry per direction");
    const int m = f.shape.dims[k];
    for (const Mat& b : conn.B[k]) {
      if (b.rows() != m || b.cols() != m) throw shape_error("field block size mismatch");
      if ((b + b.adjoint()).norm() > tol)
        throw shape_error("fields must be anti-Hermitean");
    }
  }
}

FormComponents curvature(const ConnectionConfig& conn) {
  const Frame& f = conn.frame;
  std::vector<int> dc;
  for (int k = 0; k < f.shape.factors(); ++k) dc.push_back(f.count(k));
  FormComponents w = FormComponents::zero(2, f.shape, dc);
  for (int k = 0; k < f.shape.factors(); ++k) {
    const int n = f.count(k);
    const StructConst& C = f.C[k];
    long r = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b, ++r) {
        Mat om = conn.B[k][b] * conn.B[k][a] - conn.B[k][a] * conn.B[k][b];
        for (int m = 0; m < n; ++m) {
          const double c = C.at(a, b, m);
          if (c != 0.0) om += c * conn.B[k][m];
        }
        w.comp[k][r] = std::move(om);
      }
  }
  return w;
}

PotentialSplit higgs_potential(const ConnectionConfig& conn) {
  const Frame& f = conn.frame;
  FormComponents w = curvature(conn);
  PotentialSplit out;
  out.by_factor.assign(f.shape.factors(), 0.0);
  for (int k = 0; k < f.shape.factors(); ++k) {
    const int n = f.count(k);
    const int ic = f.inherited_count[k];
    long r = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b, ++r) {
        const double v = w.comp[k][r].squaredNorm();
        out.by_factor[k] += v;
        if (a < ic && b < ic)
          out.inherited += v;
        else if (a >= ic && b >= ic)
          out.fresh += v;
        else
          out.mixed += v;
      }
  }
  for (double v : out.by_factor) out.total += v;
  return out;
}

std::vector<std::vector<Mat>> higgs_gradient(const ConnectionConfig& conn) {
  const Frame& f = conn.frame;
  FormComponents w = curvature(conn);
  std::vector<std::vector<Mat>> grad;
  for (int k = 0; k < f.shape.factors(); ++k) {
    const int n = f.count(k);
    const int m = f.shape.dims[k];
    const StructConst& C = f.C[k];
    auto om = [&](int a, int b) -> Mat {
      if (a == b) return Mat::Zero(m, m);
      const std::vector<int> t = a < b ? std::vector<int>{a, b} : std::vector<int>{b, a};
      Mat x = w.comp[k][tuple_rank(t, n)];
      return a < b ? x : Mat(-x);
    };
    grad.emplace_back(n, Mat::Zero(m, m));
    for (int mu = 0; mu < n; ++mu) {
      if (conn.frozen[k][mu]) continue;
      Mat d = Mat::Zero(m, m);
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          const double c = C.at(a, b, mu);
          if (c != 0.0) d += (2.0 * c) * w.comp[k][tuple_rank({a, b}, n)];
        }
      for (int l = 0; l < n; ++l) {
        if (l == mu) continue;
        const Mat o = om(mu, l);
        d -= 2.0 * (conn.B[k][l] * o - o * conn.B[k][l]);
      }
      grad[k][mu] = std::move(d);
    }
  }
  return grad;
}

// Gauge directions of factor k: the frame dirs then the normalized trace
// direction i*1/sqrt(m), which commutes with everything and stays massless.
static std::vector<Mat> gauge_dirs(const Frame& f, int k) {
  std::vector<Mat> dirs = f.dirs[k];
  const int m = f.shape.dims[k];
  dirs.push_back(cplx(0, 1) / std::sqrt(double(m)) * Mat::Identity(m, m));
  return dirs;
}

static Eigen::MatrixXd mass_block(const ConnectionConfig& conn, int k) {
  const Frame& f = conn.frame;
  const std::vector<Mat> dirs = gauge_dirs(f, k);
  const int g = static_cast<int>(dirs.size());
  const int nb = f.count(k);
  std::vector<std::vector<Mat>> comm(g);
  for (int l = 0; l < g; ++l) {
    comm[l].reserve(nb);
    for (int b = 0; b < nb; ++b)
      comm[l].push_back(dirs[l] * conn.B[k][b] - conn.B[k][b] * dirs[l]);
  }
  Eigen::MatrixXd M(g, g);
  for (int l1 = 0; l1 < g; ++l1)
    for (int l2 = l1; l2 < g; ++l2) {
      double s = 0;
      for (int b = 0; b < nb; ++b)
        s += (comm[l1][b].cwiseProduct(comm[l2][b].conjugate())).sum().real();
      M(l1, l2) = s;
      M(l2, l1) = s;
    }
  return M;
}

Eigen::MatrixXd mass_matrix(const ConnectionConfig& conn) {
  const Frame& f = conn.frame;
  int total = 0;
  for (int k = 0; k < f.shape.factors(); ++k) total += f.count(k) + 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(total, total);
  int off = 0;
  for (int k = 0; k < f.shape.factors(); ++k) {
    const int g = f.count(k) + 1;
    M.block(off, off, g, g) = mass_block(conn, k);
    off += g;
  }
  return M;
}

std::vector<MassLine> group_spectrum(const Eigen::MatrixXd& M,
                                     const std::vector<std::string>& labels) {
  const int g = static_cast<int>(M.rows());
  Eigen::VectorXd w;
  Mat U;
  herm_eig(M.cast<cplx>(), w, U);
  if (w.size() > 0 && w(0) < -1e-9)
    throw std::runtime_error("mass form has a negative eigenvalue beyond tolerance");
  Eigen::VectorXd masses(g);
  for (int i = 0; i < g; ++i) masses(i) = std::sqrt(std::max(0.0, w(i)));

  // Distinct label classes in first-appearance order.
  std::vector<std::string> classes;
  for (const std::string& s : labels)
    if (std::find(classes.begin(), classes.end(), s) == classes.end()) classes.push_back(s);

  std::vector<MassLine> out;
  int i = 0;
  while (i < g) {
    int j = i + 1;
    while (j < g && masses(j) - masses(i) <= 1e-6 * std::max(1.0, masses(j))) ++j;
    const int cnt = j - i;
    double mean = 0;
    for (int t = i; t < j; ++t) mean += masses(t);
    mean /= cnt;

    std::vector<double> wts(classes.size(), 0.0);
    for (size_t c = 0; c < classes.size(); ++c)
      for (int row = 0; row < g; ++row) {
        if (labels[row] != classes[c]) continue;
        for (int col = i; col < j; ++col) {
          const double a = std::abs(U(row, col));
          wts[c] += a * a;
        }
      }
    bool clean = true;
    int rsum = 0;
    for (double v : wts) {
      const double r = std::round(v);
      if (std::abs(v - r) >= 0.1) clean = false;
      rsum += static_cast<int>(r);
    }
    if (clean && rsum == cnt) {
      for (size_t c = 0; c < classes.size(); ++c) {
        const int r = static_cast<int>(std::round(wts[c]));
        if (r > 0) out.push_back({classes[c], mean, r});
      }
    } else {
      size_t best = 0;
      for (size_t c = 1; c < classes.size(); ++c)
        if (wts[c] > wts[best]) best = c;
      out.push_back({wts[best] >= 0.9 * cnt ? classes[best] : "mixed", mean, cnt});
    }
    i = j;
  }
  return out;
}

MassSpectrum mass_spectrum(const ConnectionConfig& conn) {
  const Frame& f = conn.frame;
  MassSpectrum sp;
  std::vector<double> evs;
  double offdiag2 = 0;
  for (int k = 0; k < f.shape.factors(); ++k) {
    Eigen::MatrixXd M = mass_block(conn, k);
    std::vector<std::string> labels;
    for (const DirLabel& l : f.labels[k]) labels.push_back(label_str(l));
    labels.push_back("trace");
    for (MassLine& ln : group_spectrum(M, labels)) sp.lines.push_back(std::move(ln));
    Eigen::MatrixXd off = M;
    off.diagonal().setZero();
    offdiag2 += off.squaredNorm();
    Eigen::VectorXd w;
    Mat U;
    herm_eig(M.cast<cplx>(), w, U);
    for (int t = 0; t < w.size(); ++t) evs.push_back(w(t));
  }
  std::sort(evs.begin(), evs.end());
  sp.eigenvalues = Eigen::Map<Eigen::VectorXd>(evs.data(), evs.size());
  sp.offdiag_residual = std::sqrt(offdiag2);
  return sp;
}

ConnectionConfig gauge_transform(const ConnectionConfig& conn, const AlgElement& u) {
  if (!(u.shape == conn.frame.shape)) throw shape_error("unitary shape mismatch");
  if (!is_unitary(u)) throw std::invalid_argument("gauge element must be unitary");
  ConnectionConfig out = conn;
  for (int k = 0; k < conn.frame.shape.factors(); ++k)
    for (size_t b = 0; b < conn.B[k].size(); ++b)
      out.B[k][b] = u.blocks[k].adjoint() * conn.B[k][b] * u.blocks[k];
  return out;
}

std::vector<Eigen::MatrixXd> transport_matrix(const Frame& frame, const AlgElement& u) {
  if (!is_unitary(u)) throw std::invalid_argument("gauge element must be unitary");
  std::vector<Eigen::MatrixXd> out;
  for (int k = 0; k < frame.shape.factors(); ++k) {
    const int n = frame.count(k);
    Eigen::MatrixXd U(n, n);
    for (int a = 0; a < n; ++a) {
      const Mat e = u.blocks[k].adjoint() * frame.dirs[k][a] * u.blocks[k];
      for (int b = 0; b < n; ++b)
        U(a, b) = (frame.dirs[k][b].adjoint() * e).trace().real();
    }
    out.push_back(std::move(U));
  }
  return out;
}

// Enumerate increasing p-tuples of {0..n-1} in lexicographic order.
static void each_tuple(int n, int p, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> t(p);
  for (int i = 0; i < p; ++i) t[i] = i;
  if (p > n) return;
  while (true) {
    fn(t);
    int i = p - 1;
    while (i >= 0 && t[i] == n - p + i) --i;
    if (i < 0) break;
    ++t[i];
    for (int j = i + 1; j < p; ++j) t[j] = t[j - 1] + 1;
  }
}

FormComponents transport_form(const Frame& frame, const FormComponents& w,
                              const AlgElement& u) {
  if (!(w.shape == frame.shape)) throw shape_error("form shape mismatch");
  const std::vector<Eigen::MatrixXd> U = transport_matrix(frame, u);
  FormComponents out = FormComponents::zero(w.degree, w.shape, w.dir_count);
  const int p = w.degree;
  for (int k = 0; k < w.shape.factors(); ++k) {
    const int n = w.dir_count[k];
    if (p == 0) {
      out.comp[k][0] = u.blocks[k].adjoint() * w.comp[k][0] * u.blocks[k];
      continue;
    }
    std::vector<Mat> conj(w.comp[k].size());
    for (size_t r = 0; r < w.comp[k].size(); ++r)
      conj[r] = u.blocks[k].adjoint() * w.comp[k][r] * u.blocks[k];
    each_tuple(n, p, [&](const std::vector<int>& J) {
      Mat acc = Mat::Zero(w.shape.dims[k], w.shape.dims[k]);
      each_tuple(n, p, [&](const std::vector<int>& I) {
        Eigen::MatrixXd minor(p, p);
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b) minor(a, b) = U[k](I[a], J[b]);
        const double det = minor.determinant();
        if (det != 0.0) acc += det * conj[tuple_rank(I, n)];
      });
      out.comp[k][tuple_rank(J, n)] = std::move(acc);
    });
  }
  return out;
}

ConnectionConfig make_phi_compatible(const AdaptedBasis& adapted,
                                     const ConnectionConfig& configA) {
  if (!(configA.frame.shape == adapted.step.shapeA))
    throw shape_error("source configuration shape differs from shapeA");
  ConnectionConfig out = ConnectionConfig::zero(adapted.frame);
  for (int k = 0; k < adapted.step.shapeB.factors(); ++k)
    for (int p = 0; p < adapted.inherited_count(k); ++p) {
      const auto& ix = adapted.inherited_index[k][p];
      out.B[k][p] = phi_insert(adapted.step, k, ix.i, ix.alpha, configA.B[ix.i][ix.kappa]);
      out.frozen[k][p] = 1;
    }
  return out;
}

}  // namespace ncaf
