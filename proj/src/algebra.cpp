#include "algebra.h"

namespace ncaf {

static void check_same_shape(const AlgElement& a, const AlgElement& b) {
  if (!(a.shape == b.shape)) throw shape_error("algebra shapes differ");
}

AlgElement alg_mul(const AlgElement& a, const AlgElement& b) {
  check_same_shape(a, b);
  AlgElement r(a.shape);
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = a.blocks[i] * b.blocks[i];
  return r;
}

AlgElement alg_add(const AlgElement& a, const AlgElement& b) {
  check_same_shape(a, b);
  AlgElement r(a.shape);
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = a.blocks[i] + b.blocks[i];
  return r;
}

AlgElement alg_sub(const AlgElement& a, const AlgElement& b) {
  check_same_shape(a, b);
  AlgElement r(a.shape);
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = a.blocks[i] - b.blocks[i];
  return r;
}

AlgElement alg_scale(cplx s, const AlgElement& a) {
  AlgElement r(a.shape);
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = s * a.blocks[i];
  return r;
}

AlgElement alg_adjoint(const AlgElement& a) {
  AlgElement r(a.shape);
  for (size_t i = 0; i < r.blocks.size(); ++i) r.blocks[i] = a.blocks[i].adjoint();
  return r;
}

cplx alg_trace(const AlgElement& a) {
  cplx t = 0;
  for (const Mat& m : a.blocks) t += m.trace();
  return t;
}

AlgElement commutator(const AlgElement& a, const AlgElement& b) {
  check_same_shape(a, b);
  AlgElement r(a.shape);
  for (size_t i = 0; i < r.blocks.size(); ++i)
    r.blocks[i] = a.blocks[i] * b.blocks[i] - b.blocks[i] * a.blocks[i];
  return r;
}

cplx hs_inner(const AlgElement& a, const AlgElement& b) {
  check_same_shape(a, b);
  cplx t = 0;
  for (size_t i = 0; i < a.blocks.size(); ++i)
    t += (a.blocks[i].adjoint() * b.blocks[i]).trace();
  return t;
}

double fro_norm(const AlgElement& a) {
  double s = 0;
  for (const Mat& m : a.blocks) s += m.squaredNorm();
  return std::sqrt(s);
}

bool is_anti_hermitian(const AlgElement& a, double tol) {
  for (const Mat& m : a.blocks)
    if ((m + m.adjoint()).norm() > tol) return false;
  return true;
}

bool is_unitary(const AlgElement& u, double tol) {
  for (const Mat& m : u.blocks) {
    Mat d = m * m.adjoint() - Mat::Identity(m.rows(), m.cols());
    if (d.norm() > tol) return false;
  }
  return true;
}

void herm_eig(const Mat& H, Eigen::VectorXd& evals, Mat& evecs) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  evals = es.eigenvalues();
  evecs = es.eigenvectors();
}

}  // namespace ncaf
