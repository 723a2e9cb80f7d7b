// Generator bases of sl(n) per factor, structure constants, trace metric,
// and the form pairing used to build actions.
#pragma once

#include "algebra.h"

namespace ncaf {

// Dense rank-3 real tensor C[a][b][c] flattened as ((a*n)+b)*n+c.
struct StructConst {
  int n = 0;
  std::vector<double> c;

  double at(int a, int b, int cc) const { return c[(static_cast<size_t>(a) * n + b) * n + cc]; }
  double& at(int a, int b, int cc) { return c[(static_cast<size_t>(a) * n + b) * n + cc]; }
};

// Per-factor anti-Hermitean traceless generators E_k with tr(E_a E_b^*) = delta_ab,
// identity metric, and real totally antisymmetric structure constants.
struct GeneratorBasis {
  AlgebraShape shape;
  std::vector<std::vector<Mat>> gen;        // per factor, n^2-1 generators
  std::vector<Eigen::MatrixXd> metric;      // per factor, identity in this normalization
  std::vector<StructConst> structconst;     // per factor

  int count(int factor) const { return static_cast<int>(gen[factor].size()); }
};

// Hermitean generalized Gell-Mann matrices, tr(H_a H_b) = delta_ab, enumerated
// symmetric off-diagonal, antisymmetric off-diagonal, then diagonal.
std::vector<Mat> gellmann_hermitean(int n);

GeneratorBasis build_basis(const AlgebraShape& shape);

// Positive contraction K_{l1 l2} = sum_{m,k} C_{l1 m k} C_{l2 m k} = 2n * delta.
Eigen::MatrixXd killing_check(const GeneratorBasis& basis, int factor);

// Real totally antisymmetric structure constants of an arbitrary orthonormal
// anti-Hermitean direction list: C[a][b][c] = -Re tr(E_c [E_a, E_b]).
// Throws if an imaginary residue above tol shows up.
StructConst structconst_of(const std::vector<Mat>& dirs, double tol = 1e-12);

// Degree-p form with one totally antisymmetric component array per factor;
// only strictly increasing index tuples are stored, in lexicographic order.
struct FormComponents {
  int degree = 0;
  AlgebraShape shape;
  std::vector<int> dir_count;               // derivation directions per factor
  std::vector<std::vector<Mat>> comp;       // per factor, comb(dir_count, degree) blocks

  static FormComponents zero(int degree, const AlgebraShape& shape, std::vector<int> dir_count);
};

long comb_count(int n, int p);
// Rank of a strictly increasing tuple in lexicographic order.
long tuple_rank(const std::vector<int>& idx, int n);

// (w, w') = sum_i (1/p!) sum over all index tuples of tr(w_i w'_i with raised
// indices); equals the sum over increasing tuples of tr(w w') in this metric.
cplx form_pairing(const FormComponents& w, const FormComponents& w2);

}  // namespace ncaf
