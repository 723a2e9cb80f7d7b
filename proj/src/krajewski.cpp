#include "krajewski.h"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace ncaf {

using nlohmann::json;

KOSigns ko_signs(int d) {
  if (d < 0 || d > 7) throw std::invalid_argument("KO dimension must be in 0..7");
  static const int eps[8] = {1, 1, -1, -1, -1, -1, 1, 1};
  static const int epsp[8] = {1, -1, 1, 1, 1, -1, 1, 1};
  static const int epspp[8] = {1, 0, -1, 0, 1, 0, -1, 0};
  KOSigns k;
  k.eps = eps[d];
  k.eps_prime = epsp[d];
  k.has_dprime = (d % 2 == 0);
  k.eps_dprime = k.has_dprime ? epspp[d] : 0;
  return k;
}

int KrajewskiDiagram::vertex_dim(int v) const {
  const KVertex& vx = vertices.at(v);
  return shape.dims.at(vx.i) * shape.dims.at(vx.j);
}

int KrajewskiDiagram::vertex_offset(int v) const {
  int off = 0;
  for (int t = 0; t < v; ++t) off += vertex_dim(t);
  return off;
}

int KrajewskiDiagram::total_dim() const {
  int off = 0;
  for (int t = 0; t < static_cast<int>(vertices.size()); ++t) off += vertex_dim(t);
  return off;
}

int epsilon_of_vertex(const KrajewskiDiagram& K, int v) {
  const KOSigns ks = ko_signs(K.ko);
  const KVertex& vx = K.vertices.at(v);
  if (vx.i < vx.j) return 1;
  if (vx.i > vx.j) return ks.eps;
  if (K.ko == 0 || K.ko == 1 || K.ko == 7) return 1;
  if (vx.chi != 0 && vx.chi != 1)
    throw std::invalid_argument("diagonal vertex lacks a parity bit in KO dimension 2..6");
  return vx.chi == 0 ? 1 : ks.eps;
}

static double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

static bool close_to(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const double tol = 1e-10 * std::max(1.0, std::max(max_abs(a), max_abs(b)));
  return a.size() == 0 || (a - b).cwiseAbs().maxCoeff() <= tol;
}

static std::string vertex_name(const KrajewskiDiagram& K, int v) {
  const KVertex& vx = K.vertices[v];
  std::ostringstream os;
  os << "vertex " << v << " = (" << vx.i << "," << vx.p << "," << vx.j << ")";
  return os.str();
}

// Swap of the tensor factors as a permutation H_v -> H_{Jv}.
static Mat factor_swap(const KrajewskiDiagram& K, int v) {
  const KVertex& vx = K.vertices[v];
  const int ni = K.shape.dims[vx.i], nj = K.shape.dims[vx.j];
  Mat s = Mat::Zero(ni * nj, ni * nj);
  for (int a = 0; a < ni; ++a)
    for (int b = 0; b < nj; ++b) s(b * ni + a, a * nj + b) = 1.0;
  return s;
}

// Defect of D against 1 (x) M on C^n (x) C^{p1} -> C^n (x) C^{p2}.
static double right_factor_defect(const Mat& d, int n, int p1, int p2) {
  Mat m = Mat::Zero(p2, p1);
  for (int a = 0; a < n; ++a) m += d.block(a * p2, a * p1, p2, p1);
  m /= static_cast<double>(n);
  double defect = 0.0;
  for (int a2 = 0; a2 < n; ++a2)
    for (int a1 = 0; a1 < n; ++a1) {
      Mat blk = d.block(a2 * p2, a1 * p1, p2, p1);
      if (a1 == a2) blk -= m;
      defect = std::max(defect, max_abs(blk));
    }
  return defect;
}

// Defect of D against L (x) 1 on C^{q1} (x) C^m -> C^{q2} (x) C^m.
static double left_factor_defect(const Mat& d, int m, int q1, int q2) {
  Mat l = Mat::Zero(q2, q1);
  for (int a2 = 0; a2 < q2; ++a2)
    for (int a1 = 0; a1 < q1; ++a1) {
      cplx acc = 0.0;
      for (int b = 0; b < m; ++b) acc += d(a2 * m + b, a1 * m + b);
      l(a2, a1) = acc / static_cast<double>(m);
    }
  double defect = 0.0;
  for (int a2 = 0; a2 < q2; ++a2)
    for (int a1 = 0; a1 < q1; ++a1)
      for (int b2 = 0; b2 < m; ++b2)
        for (int b1 = 0; b1 < m; ++b1) {
          cplx want = (b1 == b2) ? l(a2, a1) : cplx(0.0);
          defect = std::max(defect, std::abs(d(a2 * m + b2, a1 * m + b1) - want));
        }
  return defect;
}

std::vector<std::string> validate_diagram(const KrajewskiDiagram& K) {
  std::vector<std::string> out;
  try {
    K.shape.validate();
  } catch (const std::exception& ex) {
    out.emplace_back(std::string("shape: ") + ex.what());
    return out;
  }
  if (K.ko < 0 || K.ko > 7) {
    out.emplace_back("ko: KO dimension must be in 0..7");
    return out;
  }
  const KOSigns ks = ko_signs(K.ko);
  const int r = K.shape.factors();
  const int nv = static_cast<int>(K.vertices.size());
  const bool even = (K.ko % 2 == 0);
  const bool parity_dims = (K.ko >= 2 && K.ko <= 6);

  bool idx_ok = true;
  for (int v = 0; v < nv; ++v) {
    const KVertex& vx = K.vertices[v];
    if (vx.i < 0 || vx.i >= r || vx.j < 0 || vx.j >= r) {
      out.emplace_back("vertex " + std::to_string(v) + ": factor index out of range");
      idx_ok = false;
    }
  }
  for (int v1 = 0; v1 < nv; ++v1)
    for (int v2 = v1 + 1; v2 < nv; ++v2) {
      const KVertex &a = K.vertices[v1], &b = K.vertices[v2];
      if (a.i == b.i && a.p == b.p && a.j == b.j)
        out.emplace_back("vertices " + std::to_string(v1) + " and " + std::to_string(v2) +
                         " share the identity (i,p,j)");
    }

  bool pair_ok = (static_cast<int>(K.jpair.size()) == nv);
  if (!pair_ok) out.emplace_back("jpair: expected one entry per vertex");
  if (pair_ok)
    for (int v = 0; v < nv; ++v)
      if (K.jpair[v] < 0 || K.jpair[v] >= nv) {
        out.emplace_back("jpair: image of vertex " + std::to_string(v) + " out of range");
        pair_ok = false;
      }
  if (pair_ok && idx_ok)
    for (int v = 0; v < nv; ++v) {
      if (K.jpair[K.jpair[v]] != v) {
        out.emplace_back("jpair: not an involution at " + vertex_name(K, v));
        pair_ok = false;
        continue;
      }
      const KVertex &vx = K.vertices[v], &wx = K.vertices[K.jpair[v]];
      if (wx.i != vx.j || wx.j != vx.i) {
        out.emplace_back("jpair: " + vertex_name(K, v) + " pairs with " +
                         vertex_name(K, K.jpair[v]) + " which does not swap the factors");
        pair_ok = false;
      }
    }

  if (even) {
    for (int v = 0; v < nv; ++v)
      if (K.vertices[v].s != 1 && K.vertices[v].s != -1)
        out.emplace_back("vertex " + std::to_string(v) + ": grading sign must be +1 or -1");
    if (pair_ok)
      for (int v = 0; v < nv; ++v) {
        const int sv = K.vertices[v].s, sj = K.vertices[K.jpair[v]].s;
        if ((sv == 1 || sv == -1) && (sj == 1 || sj == -1) && sj != ks.eps_dprime * sv)
          out.emplace_back("jpair: grading of " + vertex_name(K, v) +
                           " violates s(Jv) = eps'' s(v)");
      }
  }

  if (parity_dims && idx_ok) {
    std::vector<int> diag_count(r, 0);
    for (int v = 0; v < nv; ++v) {
      const KVertex& vx = K.vertices[v];
      if (vx.i != vx.j) continue;
      ++diag_count[vx.i];
      if (vx.chi != 0 && vx.chi != 1)
        out.emplace_back("vertex " + std::to_string(v) +
                         ": diagonal vertex needs a parity bit in KO dimension 2..6");
      else if (pair_ok && K.vertices[K.jpair[v]].chi != 1 - vx.chi)
        out.emplace_back("jpair: parity of " + vertex_name(K, v) +
                         " violates chi(Jv) = 1 - chi(v)");
    }
    for (int i = 0; i < r; ++i)
      if (diag_count[i] % 2 != 0)
        out.emplace_back("factor " + std::to_string(i) + ": diagonal multiplicity " +
                         std::to_string(diag_count[i]) + " is odd in KO dimension 2..6");
  }

  if (pair_ok && idx_ok)
    for (int v = 0; v < nv; ++v) {
      int prod = 0;
      try {
        prod = epsilon_of_vertex(K, v) * epsilon_of_vertex(K, K.jpair[v]);
      } catch (const std::exception&) {
        continue;  // already reported above
      }
      if (prod != ks.eps)
        out.emplace_back("vertex " + std::to_string(v) +
                         ": eps(v,d) eps(Jv,d) differs from eps");
    }

  const int ne = static_cast<int>(K.edges.size());
  std::vector<char> edge_ok(ne, 0);
  for (int e = 0; e < ne; ++e) {
    const KEdge& ed = K.edges[e];
    if (ed.from < 0 || ed.from >= nv || ed.to < 0 || ed.to >= nv) {
      out.emplace_back("edge " + std::to_string(e) + ": endpoint out of range");
      continue;
    }
    if (!idx_ok) continue;
    if (ed.d.rows() != K.vertex_dim(ed.to) || ed.d.cols() != K.vertex_dim(ed.from)) {
      out.emplace_back("edge " + std::to_string(e) + ": decoration has wrong shape");
      continue;
    }
    edge_ok[e] = 1;
    const KVertex &v1 = K.vertices[ed.from], &v2 = K.vertices[ed.to];
    const bool row_match = (v1.i == v2.i), col_match = (v1.j == v2.j);
    if (!row_match && !col_match) {
      out.emplace_back("edge " + std::to_string(e) +
                       ": endpoints share neither the row nor the column factor");
      continue;
    }
    if (even && v1.s == -v2.s) {
      // admissible: decorations anticommute with the grading
    } else if (even) {
      out.emplace_back("edge " + std::to_string(e) + ": endpoints must carry opposite grading");
    }
    const double tol = 1e-10 * std::max(1.0, max_abs(ed.d));
    if (row_match && !col_match) {
      if (right_factor_defect(ed.d, K.shape.dims[v1.i], K.shape.dims[v1.j],
                              K.shape.dims[v2.j]) > tol)
        out.emplace_back("edge " + std::to_string(e) +
                         ": decoration is not of the form 1 (x) D_R");
    } else if (col_match && !row_match) {
      if (left_factor_defect(ed.d, K.shape.dims[v1.j], K.shape.dims[v1.i],
                             K.shape.dims[v2.i]) > tol)
        out.emplace_back("edge " + std::to_string(e) +
                         ": decoration is not of the form D_L (x) 1");
    }
  }

  // Every edge must come with its reversed partner carrying the adjoint
  // decoration; loops with self-adjoint decorations pair with themselves.
  {
    std::vector<char> used(ne, 0);
    for (int e = 0; e < ne; ++e) {
      if (used[e] || !edge_ok[e]) continue;
      const KEdge& ed = K.edges[e];
      if (ed.from == ed.to && close_to(ed.d, ed.d.adjoint())) {
        used[e] = 1;
        continue;
      }
      int found = -1;
      for (int f = 0; f < ne; ++f) {
        if (f == e || used[f] || !edge_ok[f]) continue;
        const KEdge& fd = K.edges[f];
        if (fd.from == ed.to && fd.to == ed.from && close_to(fd.d, ed.d.adjoint())) {
          found = f;
          break;
        }
      }
      if (found < 0)
        out.emplace_back("edge " + std::to_string(e) +
                         ": no reversed edge carries the adjoint decoration");
      else
        used[e] = used[found] = 1;
    }
  }

  // Every edge must come with its J image, decorated by
  // eps' eps(v1,d) eps(v2,d) (swap o conj o D o conj o swap).
  if (pair_ok && idx_ok) {
    std::vector<char> used(ne, 0);
    for (int e = 0; e < ne; ++e) {
      if (used[e] || !edge_ok[e]) continue;
      const KEdge& ed = K.edges[e];
      double sign = 0.0;
      try {
        sign = ks.eps_prime * epsilon_of_vertex(K, ed.from) * epsilon_of_vertex(K, ed.to);
      } catch (const std::exception&) {
        continue;  // missing parity already reported
      }
      const Mat expect =
          sign * (factor_swap(K, ed.to) * ed.d.conjugate() * factor_swap(K, K.jpair[ed.from]));
      const int jf = K.jpair[ed.from], jt = K.jpair[ed.to];
      if (jf == ed.from && jt == ed.to && close_to(ed.d, expect)) {
        used[e] = 1;
        continue;
      }
      int found = -1;
      for (int f = 0; f < ne; ++f) {
        if (f == e || used[f] || !edge_ok[f]) continue;
        const KEdge& fd = K.edges[f];
        if (fd.from == jf && fd.to == jt && close_to(fd.d, expect)) {
          found = f;
          break;
        }
      }
      if (found < 0)
        out.emplace_back("edge " + std::to_string(e) +
                         ": no J image edge carries the conjugated decoration");
      else
        used[e] = used[found] = 1;
    }
  }

  return out;
}

static cplx entry_of_json(const json& e) {
  if (e.is_number()) return cplx(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2) return cplx(e[0].get<double>(), e[1].get<double>());
  throw std::invalid_argument("matrix entries must be numbers or [re, im] pairs");
}

static Mat mat_of_json(const json& rows) {
  if (!rows.is_array()) throw std::invalid_argument("matrix must be an array of rows");
  const int r = static_cast<int>(rows.size());
  int c = -1;
  Mat m;
  for (int a = 0; a < r; ++a) {
    const json& row = rows[a];
    if (!row.is_array()) throw std::invalid_argument("matrix row must be an array");
    if (c < 0) {
      c = static_cast<int>(row.size());
      m = Mat::Zero(r, c);
    }
    if (static_cast<int>(row.size()) != c) throw std::invalid_argument("ragged matrix rows");
    for (int b = 0; b < c; ++b) m(a, b) = entry_of_json(row[b]);
  }
  if (r == 0) m = Mat(0, 0);
  return m;
}

static json json_of_mat(const Mat& m) {
  json rows = json::array();
  for (int a = 0; a < m.rows(); ++a) {
    json row = json::array();
    for (int b = 0; b < m.cols(); ++b) row.push_back({m(a, b).real(), m(a, b).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

KrajewskiDiagram load_diagram_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  KrajewskiDiagram K;
  K.shape.dims = j.at("shape").get<std::vector<int>>();
  K.ko = j.at("ko").get<int>();
  for (const json& vj : j.at("vertices")) {
    KVertex v;
    v.i = vj.at("i").get<int>();
    v.p = vj.value("p", 0);
    v.j = vj.at("j").get<int>();
    v.s = vj.value("s", 0);
    v.chi = vj.value("chi", -1);
    K.vertices.push_back(v);
  }
  K.jpair = j.at("jpair").get<std::vector<int>>();
  if (j.contains("edges"))
    for (const json& ej : j.at("edges")) {
      KEdge e;
      e.from = ej.at("from").get<int>();
      e.to = ej.at("to").get<int>();
      e.d = mat_of_json(ej.at("d"));
      K.edges.push_back(std::move(e));
    }
  return K;
}

std::string diagram_to_json(const KrajewskiDiagram& K) {
  json j;
  j["shape"] = K.shape.dims;
  j["ko"] = K.ko;
  json vs = json::array();
  for (const KVertex& v : K.vertices)
    vs.push_back({{"i", v.i}, {"p", v.p}, {"j", v.j}, {"s", v.s}, {"chi", v.chi}});
  j["vertices"] = std::move(vs);
  j["jpair"] = K.jpair;
  json es = json::array();
  for (const KEdge& e : K.edges)
    es.push_back({{"from", e.from}, {"to", e.to}, {"d", json_of_mat(e.d)}});
  j["edges"] = std::move(es);
  return j.dump(2);
}

Mat represent(const KrajewskiDiagram& K, const AlgElement& a) {
  if (!(a.shape == K.shape)) throw dimension_mismatch("element shape does not match the diagram");
  const int n = K.total_dim();
  Mat m = Mat::Zero(n, n);
  for (int v = 0; v < static_cast<int>(K.vertices.size()); ++v) {
    const KVertex& vx = K.vertices[v];
    const int ni = K.shape.dims[vx.i], nj = K.shape.dims[vx.j];
    const int off = K.vertex_offset(v);
    const Mat& blk = a.blocks[vx.i];
    for (int a2 = 0; a2 < ni; ++a2)
      for (int a1 = 0; a1 < ni; ++a1)
        for (int b = 0; b < nj; ++b) m(off + a2 * nj + b, off + a1 * nj + b) = blk(a2, a1);
  }
  return m;
}

Mat grading(const KrajewskiDiagram& K) {
  if (K.ko % 2 != 0) throw std::invalid_argument("grading exists only in even KO dimensions");
  const int n = K.total_dim();
  Mat g = Mat::Zero(n, n);
  for (int v = 0; v < static_cast<int>(K.vertices.size()); ++v) {
    const int off = K.vertex_offset(v), d = K.vertex_dim(v);
    for (int t = 0; t < d; ++t) g(off + t, off + t) = static_cast<double>(K.vertices[v].s);
  }
  return g;
}

Mat real_structure(const KrajewskiDiagram& K) {
  const int n = K.total_dim();
  Mat r = Mat::Zero(n, n);
  for (int v = 0; v < static_cast<int>(K.vertices.size()); ++v) {
    const KVertex& vx = K.vertices[v];
    const int ni = K.shape.dims[vx.i], nj = K.shape.dims[vx.j];
    const int off = K.vertex_offset(v), joff = K.vertex_offset(K.jpair.at(v));
    const double sign = static_cast<double>(epsilon_of_vertex(K, v));
    for (int a = 0; a < ni; ++a)
      for (int b = 0; b < nj; ++b) r(joff + b * ni + a, off + a * nj + b) = sign;
  }
  return r;
}

Mat dirac(const KrajewskiDiagram& K) {
  const int n = K.total_dim();
  Mat d = Mat::Zero(n, n);
  for (const KEdge& e : K.edges) {
    if (e.d.rows() != K.vertex_dim(e.to) || e.d.cols() != K.vertex_dim(e.from))
      throw dimension_mismatch("edge decoration has wrong shape");
    d.block(K.vertex_offset(e.to), K.vertex_offset(e.from), e.d.rows(), e.d.cols()) += e.d;
  }
  return d;
}

Mat lift_block(const LiftData& lift, const KrajewskiDiagram& ka, const KrajewskiDiagram& kb,
               int v, int w) {
  const KVertex& vx = ka.vertices.at(v);
  const KVertex& wx = kb.vertices.at(w);
  const int rows = lift.step.mult(wx.i, vx.i), cols = lift.step.mult(wx.j, vx.j);
  if (v < static_cast<int>(lift.u.size()) && w < static_cast<int>(lift.u[v].size())) {
    const Mat& u = lift.u[v][w];
    if (u.size() != 0) {
      if (u.rows() != rows || u.cols() != cols)
        throw std::invalid_argument("lift matrix u(" + std::to_string(v) + "," +
                                    std::to_string(w) + ") has the wrong shape");
      return u;
    }
  }
  return Mat::Zero(rows, cols);
}

NormalizedPhiH build_phiH(const LiftData& lift, const KrajewskiDiagram& ka,
                          const KrajewskiDiagram& kb) {
  if (!(lift.step.shapeA == ka.shape) || !(lift.step.shapeB == kb.shape))
    throw dimension_mismatch("lift step shapes do not match the diagrams");
  const int nv = static_cast<int>(ka.vertices.size());
  const int nw = static_cast<int>(kb.vertices.size());

  std::vector<std::vector<Mat>> u(nv, std::vector<Mat>(nw));
  for (int v = 0; v < nv; ++v)
    for (int w = 0; w < nw; ++w) {
      u[v][w] = lift_block(lift, ka, kb, v, w);
      if (ka.ko % 2 == 0 && kb.ko % 2 == 0 && ka.vertices[v].s != kb.vertices[w].s &&
          max_abs(u[v][w]) > 0.0)
        throw std::invalid_argument("lift violates the grading: u(v,w) nonzero with s(v) != s(w)");
    }

  // Vertices sharing (i,j) must have orthogonal lifts; otherwise re-base
  // the multiplicity space of each class by the Gram eigenvectors.
  std::map<std::pair<int, int>, std::vector<int>> classes;
  for (int v = 0; v < nv; ++v) classes[{ka.vertices[v].i, ka.vertices[v].j}].push_back(v);
  bool rebased = false;
  for (const auto& [ij, members] : classes) {
    const int c = static_cast<int>(members.size());
    if (c < 2) continue;
    Mat gram = Mat::Zero(c, c);
    for (int p = 0; p < c; ++p)
      for (int q = 0; q < c; ++q) {
        cplx acc = 0.0;
        for (int w = 0; w < nw; ++w) acc += (u[members[p]][w].adjoint() * u[members[q]][w]).trace();
        gram(p, q) = acc;
      }
    double offdiag = 0.0;
    for (int p = 0; p < c; ++p)
      for (int q = 0; q < c; ++q)
        if (p != q) offdiag = std::max(offdiag, std::abs(gram(p, q)));
    if (offdiag <= 1e-10 * std::max(1.0, max_abs(gram))) continue;
    if (ka.ko == 3 || ka.ko == 4 || ka.ko == 5 || kb.ko == 3 || kb.ko == 4 || kb.ko == 5)
      throw std::runtime_error(
          "vertex Gram matrix is not diagonal and re-basing is unsupported in KO dimension 3, 4, 5");
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    const Mat rot = es.eigenvectors();
    std::vector<std::vector<Mat>> fresh(c);
    for (int p = 0; p < c; ++p) {
      fresh[p].resize(nw);
      for (int w = 0; w < nw; ++w) {
        Mat acc = Mat::Zero(u[members[0]][w].rows(), u[members[0]][w].cols());
        for (int q = 0; q < c; ++q) acc += rot(q, p) * u[members[q]][w];
        fresh[p][w] = std::move(acc);
      }
    }
    for (int p = 0; p < c; ++p) u[members[p]] = std::move(fresh[p]);
    rebased = true;
  }

  std::vector<double> s_norms(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    for (int w = 0; w < nw; ++w) s_norms[v] += u[v][w].squaredNorm();
    if (s_norms[v] < 1e-30)
      throw std::invalid_argument("phi_H is not one-to-one: source vertex " + std::to_string(v) +
                                  " has no lift");
    const double inv = 1.0 / std::sqrt(s_norms[v]);
    for (int w = 0; w < nw; ++w) u[v][w] *= inv;
  }

  Mat phi = Mat::Zero(kb.total_dim(), ka.total_dim());
  for (int v = 0; v < nv; ++v) {
    const KVertex& vx = ka.vertices[v];
    const int ni = ka.shape.dims[vx.i], nj = ka.shape.dims[vx.j];
    const int offv = ka.vertex_offset(v);
    for (int w = 0; w < nw; ++w) {
      const Mat& uw = u[v][w];
      if (max_abs(uw) == 0.0) continue;
      const KVertex& wx = kb.vertices[w];
      const int ml = kb.shape.dims[wx.j];
      const int offw = kb.vertex_offset(w);
      for (int kap = 0; kap < uw.rows(); ++kap) {
        const int rowbase = lift.step.offset(wx.i, vx.i, kap);
        for (int tau = 0; tau < uw.cols(); ++tau) {
          const int colbase = lift.step.offset(wx.j, vx.j, tau);
          for (int a = 0; a < ni; ++a)
            for (int b = 0; b < nj; ++b)
              phi(offw + (rowbase + a) * ml + (colbase + b), offv + a * nj + b) = uw(kap, tau);
        }
      }
    }
  }

  const Mat g = phi.adjoint() * phi;
  if ((g - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw std::logic_error("phi_H failed to normalize to an isometry");

  NormalizedPhiH out;
  out.phi = std::move(phi);
  out.lift.step = lift.step;
  out.lift.u = std::move(u);
  out.s_norms = std::move(s_norms);
  out.rebased = rebased;
  return out;
}

static double max_col_norm(const Mat& m) {
  double best = 0.0;
  for (int c = 0; c < m.cols(); ++c) best = std::max(best, m.col(c).norm());
  return best;
}

CompatReport check_compat(const Mat& a, const Mat& b, const NormalizedPhiH& phiH,
                          CompatMode mode) {
  const Mat& phi = phiH.phi;
  if (a.rows() != phi.cols() || a.cols() != phi.cols() || b.rows() != phi.rows() ||
      b.cols() != phi.rows())
    throw dimension_mismatch("operators do not act on the lifted spaces");
  const Mat phi_a = phi * a;
  const Mat b_phi = b * phi;
  CompatReport rep;
  if (mode == CompatMode::weak) {
    rep.residual = max_col_norm(phi_a - phi * (phi.adjoint() * b_phi));
  } else {
    rep.residual = max_col_norm(phi_a - b_phi);
    rep.residual = std::max(rep.residual, max_col_norm(b_phi - phi * (phi.adjoint() * b_phi)));
  }
  rep.ok = rep.residual < 1e-10;
  return rep;
}

JCompatReport check_J_compat(const KrajewskiDiagram& ka, const KrajewskiDiagram& kb,
                             const LiftData& lift) {
  if (ka.ko != kb.ko)
    return {false, "KO dimensions differ: " + std::to_string(ka.ko) + " vs " +
                       std::to_string(kb.ko)};
  const int nv = static_cast<int>(ka.vertices.size());
  const int nw = static_cast<int>(kb.vertices.size());
  for (int v = 0; v < nv; ++v)
    for (int w = 0; w < nw; ++w) {
      const Mat uvw = lift_block(lift, ka, kb, v, w);
      const Mat ujj = lift_block(lift, ka, kb, ka.jpair.at(v), kb.jpair.at(w));
      const double ratio = epsilon_of_vertex(ka, v) * epsilon_of_vertex(kb, w);
      const Mat expect = ratio * uvw.adjoint();
      if (ujj.rows() != expect.rows() || ujj.cols() != expect.cols())
        return {false, "u(Jv,Jw) has the wrong shape at v=" + std::to_string(v) +
                           ", w=" + std::to_string(w)};
      if (ujj.size() != 0 &&
          (ujj - expect).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + max_abs(uvw)))
        return {false, "u(Jv,Jw) mismatch at v=" + std::to_string(v) + ", w=" +
                           std::to_string(w)};
    }
  return {true, ""};
}

TraceCompare trace_compare(const std::vector<std::pair<Mat, Mat>>& pairs,
                           const NormalizedPhiH& phiH) {
  const int n = static_cast<int>(pairs.size());
  if (n == 0) throw std::invalid_argument("trace comparison needs at least one pair");
  const int da = static_cast<int>(phiH.phi.cols()), db = static_cast<int>(phiH.phi.rows());
  for (int t = 0; t < n; ++t) {
    const auto& [a, b] = pairs[t];
    if (a.rows() != da || a.cols() != da || b.rows() != db || b.cols() != db)
      throw dimension_mismatch("trace comparison pair " + std::to_string(t) +
                               " has the wrong shape");
    if (!check_compat(a, b, phiH, CompatMode::weak).ok)
      throw std::invalid_argument("trace comparison pair " + std::to_string(t) +
                                  " is not weakly compatible");
  }

  TraceCompare out;
  Mat prod_a = pairs[0].first;
  Mat prod_b = pairs[0].second;
  for (int t = 1; t < n; ++t) {
    prod_a = prod_a * pairs[t].first;
    prod_b = prod_b * pairs[t].second;
  }
  out.tr_a = prod_a.trace();
  out.tr_b = prod_b.trace();

  // Expand tr(B_1...B_n) over image / off-image legs; every sequence except
  // the all-image one contributes to tnic.
  const Mat p = phiH.phi * phiH.phi.adjoint();
  const Mat q = Mat::Identity(db, db) - p;
  cplx tnic = 0.0;
  for (long mask = 1; mask < (1L << n); ++mask) {
    Mat term = Mat::Identity(db, db);
    for (int t = 0; t < n; ++t) {
      const Mat& left = ((mask >> t) & 1) ? q : p;
      const Mat& right = ((mask >> ((t + 1) % n)) & 1) ? q : p;
      term = term * (left * pairs[t].second * right);
    }
    tnic += term.trace();
  }
  out.tnic = tnic;
  return out;
}

}  // namespace ncaf
