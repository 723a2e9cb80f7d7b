#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "algebra.h"

#include <doctest.h>

#include <random>

using namespace ncaf;

namespace {

Mat rand_mat(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = cplx(u(rng), u(rng));
  return m;
}

AlgElement rand_elem(const AlgebraShape& s, std::mt19937_64& rng) {
  AlgElement a(s);
  for (int i = 0; i < s.factors(); ++i) a.blocks[i] = rand_mat(s.dims[i], rng);
  return a;
}

}  // namespace

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(AlgebraShape(std::vector<int>{}), shape_error);
  CHECK_THROWS_AS(AlgebraShape({2, 0}), shape_error);
  CHECK_THROWS_AS(AlgebraShape({-1}), shape_error);
  const AlgebraShape s({2, 3});
  CHECK(s.factors() == 2);
  CHECK(s.total_dim() == 5);
  CHECK(s == AlgebraShape({2, 3}));
  CHECK_FALSE(s == AlgebraShape({3, 2}));
}

TEST_CASE("ring operations and trace") {
  std::mt19937_64 rng(7);
  const AlgebraShape s({2, 3});
  const AlgElement a = rand_elem(s, rng), b = rand_elem(s, rng);
  const AlgElement one = AlgElement::identity(s);

  // unit, cyclic trace, adjoint antihomomorphism
  CHECK(fro_norm(alg_sub(alg_mul(a, one), a)) < 1e-14);
  CHECK(std::abs(alg_trace(alg_mul(a, b)) - alg_trace(alg_mul(b, a))) < 1e-12);
  const AlgElement lhs = alg_adjoint(alg_mul(a, b));
  const AlgElement rhs = alg_mul(alg_adjoint(b), alg_adjoint(a));
  CHECK(fro_norm(alg_sub(lhs, rhs)) < 1e-12);

  // commutator antisymmetry and tracelessness
  const AlgElement c1 = commutator(a, b), c2 = commutator(b, a);
  CHECK(fro_norm(alg_add(c1, c2)) < 1e-12);
  CHECK(std::abs(alg_trace(c1)) < 1e-12);

  // scaling is linear in the scalar
  const AlgElement sc = alg_scale(cplx(2.0, -1.0), a);
  CHECK(fro_norm(alg_sub(sc, alg_add(a, alg_scale(cplx(1.0, -1.0), a)))) < 1e-12);
}

TEST_CASE("inner product and norm") {
  std::mt19937_64 rng(11);
  const AlgebraShape s({3, 2});
  const AlgElement a = rand_elem(s, rng), b = rand_elem(s, rng);
  CHECK(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))) < 1e-12);
  CHECK(std::abs(hs_inner(a, a).imag()) < 1e-12);
  CHECK(fro_norm(a) * fro_norm(a) == doctest::Approx(hs_inner(a, a).real()).epsilon(1e-12));
}

TEST_CASE("unitarity and anti-hermiticity predicates") {
  std::mt19937_64 rng(13);
  const AlgebraShape s({2, 3});
  const AlgElement a = rand_elem(s, rng);
  const AlgElement skew = alg_sub(a, alg_adjoint(a));
  CHECK(is_anti_hermitian(skew));
  CHECK_FALSE(is_anti_hermitian(alg_add(a, alg_adjoint(a))));

  // eigenvectors of a Hermitean element form a unitary
  AlgElement u(s);
  for (int i = 0; i < s.factors(); ++i) {
    const Mat h = a.blocks[i] + a.blocks[i].adjoint();
    Eigen::VectorXd w;
    Mat v;
    herm_eig(h, w, v);
    u.blocks[i] = v;
  }
  CHECK(is_unitary(u));
  CHECK(is_unitary(AlgElement::identity(s)));
  CHECK_FALSE(is_unitary(alg_scale(2.0, AlgElement::identity(s))));
}

TEST_CASE("hermitean eigendecomposition contract") {
  std::mt19937_64 rng(17);
  const Mat x = rand_mat(5, rng);
  const Mat h = x + x.adjoint();
  Eigen::VectorXd w;
  Mat v;
  herm_eig(h, w, v);
  for (int i = 0; i + 1 < w.size(); ++i) CHECK(w(i) <= w(i + 1) + 1e-14);
  CHECK((h * v - v * w.asDiagonal().toDenseMatrix().cast<cplx>()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((v.adjoint() * v - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
}
