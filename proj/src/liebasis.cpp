#include "liebasis.h"

namespace ncaf {

std::vector<Mat> gellmann_hermitean(int n) {
  std::vector<Mat> out;
  if (n < 2) return out;
  const double s = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Mat m = Mat::Zero(n, n);
      m(a, b) = s;
      m(b, a) = s;
      out.push_back(m);
    }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Mat m = Mat::Zero(n, n);
      m(a, b) = cplx(0, -s);
      m(b, a) = cplx(0, s);
      out.push_back(m);
    }
  for (int k = 1; k < n; ++k) {
    Mat m = Mat::Zero(n, n);
    for (int t = 0; t < k; ++t) m(t, t) = 1.0;
    m(k, k) = -k;
    out.push_back(m / std::sqrt(double(k) * (k + 1)));
  }
  return out;
}

StructConst structconst_of(const std::vector<Mat>& dirs, double tol) {
  const int n = static_cast<int>(dirs.size());
  StructConst sc;
  sc.n = n;
  sc.c.assign(static_cast<size_t>(n) * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Mat com = dirs[a] * dirs[b] - dirs[b] * dirs[a];
      for (int cc = 0; cc < n; ++cc) {
        cplx v = -(dirs[cc] * com).trace();
        if (std::abs(v.imag()) > tol)
          throw std::runtime_error("structure constants carry an imaginary residue");
        sc.at(a, b, cc) = v.real();
        sc.at(b, a, cc) = -v.real();
      }
    }
  return sc;
}

GeneratorBasis build_basis(const AlgebraShape& shape) {
  GeneratorBasis b;
  b.shape = shape;
  for (int n : shape.dims) {
    std::vector<Mat> gens;
    for (const Mat& h : gellmann_hermitean(n)) gens.push_back(cplx(0, 1) * h);
    b.metric.push_back(Eigen::MatrixXd::Identity(gens.size(), gens.size()));
    b.structconst.push_back(structconst_of(gens));
    b.gen.push_back(std::move(gens));
  }
  return b;
}

Eigen::MatrixXd killing_check(const GeneratorBasis& basis, int factor) {
  const StructConst& sc = basis.structconst[factor];
  const int n = sc.n;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int l1 = 0; l1 < n; ++l1)
    for (int l2 = 0; l2 < n; ++l2) {
      double s = 0;
      for (int m = 0; m < n; ++m)
        for (int kk = 0; kk < n; ++kk) s += sc.at(l1, m, kk) * sc.at(l2, m, kk);
      k(l1, l2) = s;
    }
  return k;
}

long comb_count(int n, int p) {
  if (p < 0 || p > n) return 0;
  long r = 1;
  for (int i = 0; i < p; ++i) r = r * (n - i) / (i + 1);
  return r;
}

long tuple_rank(const std::vector<int>& idx, int n) {
  const int p = static_cast<int>(idx.size());
  long rank = 0;
  int prev = -1;
  for (int pos = 0; pos < p; ++pos) {
    for (int v = prev + 1; v < idx[pos]; ++v) rank += comb_count(n - v - 1, p - pos - 1);
    prev = idx[pos];
  }
  return rank;
}

FormComponents FormComponents::zero(int degree, const AlgebraShape& shape,
                                    std::vector<int> dir_count) {
  FormComponents f;
  f.degree = degree;
  f.shape = shape;
  f.dir_count = std::move(dir_count);
  for (size_t i = 0; i < shape.dims.size(); ++i) {
    const int n = shape.dims[i];
    f.comp.emplace_back(comb_count(f.dir_count[i], degree), Mat::Zero(n, n));
  }
  return f;
}

cplx form_pairing(const FormComponents& w, const FormComponents& w2) {
  if (w.degree != w2.degree) throw std::invalid_argument("form degrees differ");
  if (!(w.shape == w2.shape) || w.dir_count != w2.dir_count)
    throw shape_error("form shapes differ");
  cplx t = 0;
  for (size_t i = 0; i < w.comp.size(); ++i)
    for (size_t k = 0; k < w.comp[i].size(); ++k) t += (w.comp[i][k] * w2.comp[i][k]).trace();
  return t;
}

}  // namespace ncaf
