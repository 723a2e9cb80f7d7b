// Connections on derivation frames: curvature, the Higgs-type potential with
// its inherited/mixed/new split, gradients, gauge transport, mass spectra,
// and lifts of source-level configurations through a Bratteli step.
#pragma once

#include "afembed.h"

namespace ncaf {

// Scalar-sector fields: one anti-Hermitean m_k x m_k matrix per frame
// direction, decomposable as B = b^lambda E_lambda + i b^0 1/sqrt(m).
// Frozen directions hold inherited values and are skipped by gradients.
struct ConnectionConfig {
  Frame frame;
  std::vector<std::vector<Mat>> B;
  std::vector<std::vector<char>> frozen;

  static ConnectionConfig zero(const Frame& frame);
  static ConnectionConfig basis(const Frame& frame);  // B_beta = E_beta
};

// Throws shape_error on size or anti-Hermiticity violations.
void validate_connection(const ConnectionConfig& conn, double tol = 1e-12);

// Omega_{kl} = C_{kl}^m B_m - [B_k, B_l] over increasing direction pairs of
// every factor; cross-factor components vanish for block-supported fields.
FormComponents curvature(const ConnectionConfig& conn);

struct PotentialSplit {
  double total = 0, inherited = 0, mixed = 0, fresh = 0;
  std::vector<double> by_factor;
};

// V = (1/2) sum over ordered pairs of tr(Omega Omega^*), split by whether
// both directions are inherited, both complementary, or one of each.
PotentialSplit higgs_potential(const ConnectionConfig& conn);

// Riesz gradient D_beta with dV = Re tr(X^* D_beta) under B_beta -> B_beta+X;
// anti-Hermitean, zero on frozen directions.
std::vector<std::vector<Mat>> higgs_gradient(const ConnectionConfig& conn);

// Quadratic gauge-mass form M_{l1 l2} = sum_beta Re tr([X_l1,B_beta]
// [X_l2,B_beta]^*) over per-factor gauge directions [frame dirs..., trace];
// exactly block diagonal across factors.
Eigen::MatrixXd mass_matrix(const ConnectionConfig& conn);

struct MassLine {
  std::string label;
  double mass = 0;
  int degeneracy = 0;
};

struct MassSpectrum {
  std::vector<MassLine> lines;        // ascending within each factor
  Eigen::VectorXd eigenvalues;        // all factors merged, ascending
  double offdiag_residual = 0;        // Frobenius norm off the diagonal
};

// Shared grouping: ascending masses sqrt(clip(eig, 0)), degeneracy chaining at
// relative tolerance 1e-6, groups split by integer per-class eigenvector
// weights when clean, else labeled by a >= 90% dominant class or "mixed".
std::vector<MassLine> group_spectrum(const Eigen::MatrixXd& M,
                                     const std::vector<std::string>& labels);

MassSpectrum mass_spectrum(const ConnectionConfig& conn);

// B_beta -> u^* B_beta u blockwise; throws std::invalid_argument off unitarity.
ConnectionConfig gauge_transform(const ConnectionConfig& conn, const AlgElement& u);

// Real orthogonal change of frame U with u^* E_alpha u = U(alpha,beta) E_beta.
std::vector<Eigen::MatrixXd> transport_matrix(const Frame& frame, const AlgElement& u);

// Transport of a form along the inner automorphism: values conjugated by u,
// antisymmetric indices rotated by minors of the transport matrix.
FormComponents transport_form(const Frame& frame, const FormComponents& w,
                              const AlgElement& u);

// Lift of a source-level configuration: inherited direction (i,alpha,kappa)
// receives the block insertion of B^i_kappa (trace part included) and is
// frozen; complementary directions start free at zero.
ConnectionConfig make_phi_compatible(const AdaptedBasis& adapted,
                                     const ConnectionConfig& configA);

}  // namespace ncaf
