// Dense complex matrix arithmetic on direct sums of matrix algebras.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncaf {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

struct shape_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Ordered factor dimensions (n_1, ..., n_r), r >= 1, all n_i >= 1.
struct AlgebraShape {
  std::vector<int> dims;

  AlgebraShape() = default;
  explicit AlgebraShape(std::vector<int> d) : dims(std::move(d)) { validate(); }

  void validate() const {
    if (dims.empty()) throw shape_error("shape needs at least one factor");
    for (int n : dims)
      if (n < 1) throw shape_error("factor dimensions must be positive");
  }
  int factors() const { return static_cast<int>(dims.size()); }
  int total_dim() const {
    int t = 0;
    for (int n : dims) t += n;
    return t;
  }
  bool operator==(const AlgebraShape&) const = default;
};

// Element of a direct sum: one dense square block per factor.
struct AlgElement {
  AlgebraShape shape;
  std::vector<Mat> blocks;

  AlgElement() = default;
  explicit AlgElement(const AlgebraShape& s) : shape(s) {
    blocks.reserve(s.dims.size());
    for (int n : s.dims) blocks.push_back(Mat::Zero(n, n));
  }
  static AlgElement identity(const AlgebraShape& s) {
    AlgElement e(s);
    for (size_t i = 0; i < e.blocks.size(); ++i)
      e.blocks[i] = Mat::Identity(s.dims[i], s.dims[i]);
    return e;
  }
};

AlgElement alg_mul(const AlgElement& a, const AlgElement& b);
AlgElement alg_add(const AlgElement& a, const AlgElement& b);
AlgElement alg_sub(const AlgElement& a, const AlgElement& b);
AlgElement alg_scale(cplx s, const AlgElement& a);
AlgElement alg_adjoint(const AlgElement& a);
cplx alg_trace(const AlgElement& a);
AlgElement commutator(const AlgElement& a, const AlgElement& b);

// Hilbert-Schmidt inner product tr(a^* b) and the induced norm.
cplx hs_inner(const AlgElement& a, const AlgElement& b);
double fro_norm(const AlgElement& a);

bool is_anti_hermitian(const AlgElement& a, double tol = 1e-12);
bool is_unitary(const AlgElement& u, double tol = 1e-10);

// Hermitean eigendecomposition contract: ascending real eigenvalues,
// orthonormal eigenvector columns.
void herm_eig(const Mat& H, Eigen::VectorXd& evals, Mat& evecs);

}  // namespace ncaf
