#include "afembed.h"

#include <json.hpp>

namespace ncaf {

using nlohmann::json;

BratteliStep make_step(const AlgebraShape& shapeA, const AlgebraShape& shapeB,
                       const Eigen::MatrixXi& mult, const std::vector<int>* slack) {
  BratteliStep st;
  st.shapeA = shapeA;
  st.shapeB = shapeB;
  st.mult = mult;
  if (mult.rows() != shapeB.factors() || mult.cols() != shapeA.factors())
    throw dimension_mismatch("multiplicity matrix must be s x r");
  for (int k = 0; k < mult.rows(); ++k)
    for (int i = 0; i < mult.cols(); ++i)
      if (mult(k, i) < 0) throw dimension_mismatch("multiplicities must be non-negative");
  if (slack) {
    st.slack = *slack;
    if (static_cast<int>(st.slack.size()) != shapeB.factors())
      throw dimension_mismatch("slack list length must match target factors");
  } else {
    for (int k = 0; k < shapeB.factors(); ++k) {
      int used = 0;
      for (int i = 0; i < shapeA.factors(); ++i) used += mult(k, i) * shapeA.dims[i];
      st.slack.push_back(shapeB.dims[k] - used);
    }
  }
  validate_step(st);
  return st;
}

void validate_step(const BratteliStep& step) {
  for (int k = 0; k < step.shapeB.factors(); ++k) {
    int rhs = step.slack[k];
    for (int i = 0; i < step.shapeA.factors(); ++i)
      rhs += step.mult(k, i) * step.shapeA.dims[i];
    if (step.slack[k] < 0 || rhs != step.shapeB.dims[k])
      throw dimension_mismatch("block " + std::to_string(k) + ": m_k=" +
                               std::to_string(step.shapeB.dims[k]) +
                               " but n0 + sum alpha*n = " + std::to_string(rhs));
  }
}

BratteliStep load_step_json(const std::string& json_text) {
  json j = json::parse(json_text);
  AlgebraShape a(j.at("shapeA").get<std::vector<int>>());
  AlgebraShape b(j.at("shapeB").get<std::vector<int>>());
  const int r = a.factors(), s = b.factors();
  Eigen::MatrixXi mult(s, r);
  const json& jm = j.at("mult");
  if (!jm.is_array() || jm.empty()) throw dimension_mismatch("mult must be a non-empty array");
  if (jm[0].is_array()) {
    if (static_cast<int>(jm.size()) != s) throw dimension_mismatch("mult row count mismatch");
    for (int k = 0; k < s; ++k) {
      if (static_cast<int>(jm[k].size()) != r) throw dimension_mismatch("mult column count mismatch");
      for (int i = 0; i < r; ++i) mult(k, i) = jm[k][i].get<int>();
    }
  } else {
    if (static_cast<int>(jm.size()) != s * r) throw dimension_mismatch("mult length must be s*r");
    for (int k = 0; k < s; ++k)
      for (int i = 0; i < r; ++i) mult(k, i) = jm[k * r + i].get<int>();
  }
  std::vector<int> slack;
  if (j.contains("slack")) {
    slack = j.at("slack").get<std::vector<int>>();
    return make_step(a, b, mult, &slack);
  }
  return make_step(a, b, mult, nullptr);
}

std::string step_to_json(const BratteliStep& step) {
  json j;
  j["shapeA"] = step.shapeA.dims;
  j["shapeB"] = step.shapeB.dims;
  std::vector<int> flat;
  for (int k = 0; k < step.mult.rows(); ++k)
    for (int i = 0; i < step.mult.cols(); ++i) flat.push_back(step.mult(k, i));
  j["mult"] = flat;
  j["slack"] = step.slack;
  return j.dump(2);
}

BratteliStep compose_steps(const BratteliStep& first, const BratteliStep& second) {
  if (!(first.shapeB == second.shapeA))
    throw dimension_mismatch("inner shapes of composed steps differ");
  Eigen::MatrixXi mult = second.mult * first.mult;
  return make_step(first.shapeA, second.shapeB, mult, nullptr);
}

AlgElement phi_apply(const BratteliStep& step, const AlgElement& a, bool unital_lift) {
  if (!(a.shape == step.shapeA)) throw shape_error("element shape differs from shapeA");
  AlgElement out(step.shapeB);
  for (int k = 0; k < step.shapeB.factors(); ++k) {
    for (int i = 0; i < step.shapeA.factors(); ++i) {
      const int n = step.shapeA.dims[i];
      for (int al = 0; al < step.mult(k, i); ++al) {
        const int off = step.offset(k, i, al);
        out.blocks[k].block(off, off, n, n) = a.blocks[i];
      }
    }
    if (unital_lift && step.slack[k] > 0) {
      const int off = step.slack_offset(k);
      out.blocks[k].block(off, off, step.slack[k], step.slack[k]) =
          Mat::Identity(step.slack[k], step.slack[k]);
    }
  }
  return out;
}

Mat phi_insert(const BratteliStep& step, int k, int i, int alpha, const Mat& x) {
  const int m = step.shapeB.dims[k];
  const int n = step.shapeA.dims[i];
  Mat out = Mat::Zero(m, m);
  const int off = step.offset(k, i, alpha);
  out.block(off, off, n, n) = x;
  return out;
}

AlgElement slack_projector(const BratteliStep& step) {
  AlgElement one_a = AlgElement::identity(step.shapeA);
  return alg_sub(AlgElement::identity(step.shapeB), phi_apply(step, one_a));
}

Eigen::VectorX<long long> k0_push(const BratteliStep& step,
                                  const Eigen::VectorX<long long>& v) {
  if (v.size() != step.shapeA.factors())
    throw dimension_mismatch("K0 vector length must match source factors");
  Eigen::VectorX<long long> out(step.shapeB.factors());
  for (int k = 0; k < step.shapeB.factors(); ++k) {
    long long s = 0;
    for (int i = 0; i < step.shapeA.factors(); ++i) s += step.mult(k, i) * v(i);
    out(k) = s;
  }
  return out;
}

std::string label_str(const DirLabel& l) {
  if (l.kind == 'a' || l.kind == 'c') return std::string(1, l.kind) + std::to_string(l.factor);
  return std::string(1, l.kind);
}

Frame frame_of(const GeneratorBasis& basis) {
  Frame f;
  f.shape = basis.shape;
  for (int i = 0; i < basis.shape.factors(); ++i) {
    f.dirs.push_back(basis.gen[i]);
    f.labels.emplace_back(basis.count(i), DirLabel{'a', i + 1});
    f.C.push_back(basis.structconst[i]);
    f.inherited_count.push_back(0);
  }
  return f;
}

int AdaptedBasis::inherited_pos(int k, int i, int alpha, int kappa) const {
  const auto& idx = inherited_index[k];
  for (size_t p = 0; p < idx.size(); ++p)
    if (idx[p].i == i && idx[p].alpha == alpha && idx[p].kappa == kappa)
      return static_cast<int>(p);
  throw std::invalid_argument("inherited index not present");
}

AdaptedBasis adapted_basis(const BratteliStep& step, const GeneratorBasis& basisA) {
  validate_step(step);
  if (!(basisA.shape == step.shapeA)) throw shape_error("basis shape differs from shapeA");

  AdaptedBasis ab;
  ab.step = step;
  ab.frame.shape = step.shapeB;

  const int r = step.shapeA.factors();
  for (int k = 0; k < step.shapeB.factors(); ++k) {
    const int m = step.shapeB.dims[k];
    const int n0 = step.slack[k];
    const int soff = step.slack_offset(k);
    std::vector<Mat> dirs;
    std::vector<DirLabel> labels;
    std::vector<AdaptedBasis::InhIndex> inh_idx;
    std::array<int, 5> fam{0, 0, 0, 0, 0};

    // Inherited lifts, ordered by (i, alpha, kappa).
    for (int i = 0; i < r; ++i)
      for (int al = 0; al < step.mult(k, i); ++al)
        for (int kp = 0; kp < basisA.count(i); ++kp) {
          dirs.push_back(phi_insert(step, k, i, al, basisA.gen[i][kp]));
          labels.push_back({'a', i + 1});
          inh_idx.push_back({i, al, kp});
        }
    const int icount = static_cast<int>(dirs.size());

    auto gs_accept = [&](Mat x, DirLabel lab) {
      for (const Mat& d : dirs) x -= (d.adjoint() * x).trace() * d;
      x -= (x.trace() / double(m)) * Mat::Identity(m, m);
      const double nrm = x.norm();
      if (nrm < 1e-10)
        throw std::runtime_error("complement family produced a dependent vector");
      dirs.push_back(x / nrm);
      labels.push_back(lab);
    };

    // Family 1: slack-block sl(n0).
    for (const Mat& h : gellmann_hermitean(n0)) {
      Mat x = Mat::Zero(m, m);
      x.block(soff, soff, n0, n0) = cplx(0, 1) * h;
      gs_accept(x, {'e', 0});
      ++fam[0];
    }

    // Enveloping regions (factors present in this block), slack region last.
    struct Region {
      int off, size, factor;  // factor -1 marks the slack region
    };
    std::vector<Region> regions;
    for (int i = 0; i < r; ++i)
      if (step.mult(k, i) > 0)
        regions.push_back({step.offset(k, i, 0), step.mult(k, i) * step.shapeA.dims[i], i});
    if (n0 > 0) regions.push_back({soff, n0, -1});
    const double s2 = 1.0 / std::sqrt(2.0);

    // Family 2: entries outside the enveloping squares, symmetric then
    // antisymmetric per position, row-major per region pair.
    for (size_t p = 0; p < regions.size(); ++p)
      for (size_t q = p + 1; q < regions.size(); ++q) {
        DirLabel lab{'b', 0};
        if (regions[p].factor < 0 || regions[q].factor < 0) {
          const int f = regions[p].factor >= 0 ? regions[p].factor : regions[q].factor;
          lab = {'c', f + 1};
        }
        for (int a = 0; a < regions[p].size; ++a)
          for (int b = 0; b < regions[q].size; ++b) {
            const int ra = regions[p].off + a, cb = regions[q].off + b;
            Mat x = Mat::Zero(m, m);
            x(ra, cb) = s2;
            x(cb, ra) = s2;
            gs_accept(cplx(0, 1) * x, lab);
            Mat y = Mat::Zero(m, m);
            y(ra, cb) = cplx(0, -s2);
            y(cb, ra) = cplx(0, s2);
            gs_accept(cplx(0, 1) * y, lab);
            fam[1] += 2;
          }
      }

    // Family 3: entries between different copies inside an enveloping square.
    for (int i = 0; i < r; ++i) {
      const int n = step.shapeA.dims[i];
      for (int a1 = 0; a1 < step.mult(k, i); ++a1)
        for (int a2 = a1 + 1; a2 < step.mult(k, i); ++a2)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              const int ra = step.offset(k, i, a1) + a, cb = step.offset(k, i, a2) + b;
              Mat x = Mat::Zero(m, m);
              x(ra, cb) = s2;
              x(cb, ra) = s2;
              gs_accept(cplx(0, 1) * x, {'b', 0});
              Mat y = Mat::Zero(m, m);
              y(ra, cb) = cplx(0, -s2);
              y(cb, ra) = cplx(0, s2);
              gs_accept(cplx(0, 1) * y, {'b', 0});
              fam[2] += 2;
            }
    }

    // Family 4: copy-projector differences inside an enveloping square.
    for (int i = 0; i < r; ++i) {
      const int n = step.shapeA.dims[i];
      for (int al = 0; al + 1 < step.mult(k, i); ++al) {
        Mat x = Mat::Zero(m, m);
        const int o1 = step.offset(k, i, al), o2 = step.offset(k, i, al + 1);
        x.block(o1, o1, n, n) = Mat::Identity(n, n);
        x.block(o2, o2, n, n) = -Mat::Identity(n, n);
        gs_accept(cplx(0, 1) * x / std::sqrt(2.0 * n), {'d', 0});
        ++fam[3];
      }
    }

    // Family 5: cross-enveloping diagonals on first copies, consecutive factor
    // pairs first, the slack pair last.
    std::vector<std::pair<int, int>> chain;  // -1 marks slack
    std::vector<int> present;
    for (int i = 0; i < r; ++i)
      if (step.mult(k, i) > 0) present.push_back(i);
    for (size_t t = 0; t + 1 < present.size(); ++t)
      chain.push_back({present[t], present[t + 1]});
    if (n0 > 0 && !present.empty()) chain.push_back({-1, present[0]});
    for (auto [x_i, y_i] : chain) {
      const int nx = x_i < 0 ? n0 : step.shapeA.dims[x_i];
      const int ny = step.shapeA.dims[y_i];
      const int ox = x_i < 0 ? soff : step.offset(k, x_i, 0);
      const int oy = step.offset(k, y_i, 0);
      Mat x = Mat::Zero(m, m);
      x.block(ox, ox, nx, nx) = double(ny) * Mat::Identity(nx, nx);
      x.block(oy, oy, ny, ny) = -double(nx) * Mat::Identity(ny, ny);
      Mat ax = cplx(0, 1) * x;
      // The slack-entry label test runs on the orthonormalized vector.
      for (const Mat& d : dirs) ax -= (d.adjoint() * ax).trace() * d;
      ax -= (ax.trace() / double(m)) * Mat::Identity(m, m);
      const double nrm = ax.norm();
      if (nrm < 1e-10)
        throw std::runtime_error("complement family produced a dependent vector");
      ax /= nrm;
      const bool slack_entry = n0 > 0 && std::abs(ax(m - 1, m - 1)) > 1e-9;
      dirs.push_back(ax);
      labels.push_back(slack_entry ? DirLabel{'e', 0} : DirLabel{'d', 0});
      ++fam[4];
    }

    const int want = m * m - 1;
    if (static_cast<int>(dirs.size()) != want)
      throw std::runtime_error("adapted basis count mismatch in block " + std::to_string(k));
    // Union orthonormality guard.
    for (size_t a = 0; a < dirs.size(); ++a)
      for (size_t b = a; b < dirs.size(); ++b) {
        const cplx g = (dirs[a].adjoint() * dirs[b]).trace();
        const double want_g = a == b ? 1.0 : 0.0;
        if (std::abs(g - want_g) > 1e-12)
          throw std::runtime_error("adapted basis lost orthonormality");
      }

    ab.frame.C.push_back(structconst_of(dirs));
    ab.frame.dirs.push_back(std::move(dirs));
    ab.frame.labels.push_back(std::move(labels));
    ab.frame.inherited_count.push_back(icount);
    ab.family_sizes.push_back(fam);
    ab.inherited_index.push_back(std::move(inh_idx));
  }
  return ab;
}

}  // namespace ncaf
