// Finite real spectral triples as decorated graphs over (+)M_{n_i}: vertex
// bookkeeping with KO-dimension signs, validation of the decoration rules,
// the matrix lift u(v,w) of a Bratteli step to a normalized isometry between
// the Hilbert spaces, operator compatibility checks, and the trace
// comparison identity.
#pragma once

#include "afembed.h"

#include <string>
#include <utility>
#include <vector>

namespace ncaf {

// Sign triple attached to a KO dimension; the third sign exists only for
// even dimensions.
struct KOSigns {
  int eps = 1;
  int eps_prime = 1;
  int eps_dprime = 0;
  bool has_dprime = false;
};
KOSigns ko_signs(int d);

// Vertex (i, p, j): row factor i, copy index p, column factor j, carrying
// the spinor space C^{n_i} (x) C^{n_j}, vectorized row-major (row factor
// index major).  s is the grading sign (even KO dimensions); chi is the
// parity bit of diagonal vertices in KO dimensions 2..6, -1 when unused.
struct KVertex {
  int i = 0;
  int p = 0;
  int j = 0;
  int s = 0;
  int chi = -1;
};

// Directed decorated edge; the decoration maps the source vertex space into
// the target vertex space.
struct KEdge {
  int from = 0;
  int to = 0;
  Mat d;
};

struct KrajewskiDiagram {
  AlgebraShape shape;
  int ko = 0;
  std::vector<KVertex> vertices;
  std::vector<int> jpair;  // involution pairing (i,p,j) with some (j,q,i)
  std::vector<KEdge> edges;

  int vertex_dim(int v) const;
  int vertex_offset(int v) const;
  int total_dim() const;
};

// Sign epsilon(v,d): 1 above the diagonal, eps below, and on the diagonal 1
// (KO 0,1,7) or eps^chi (KO 2..6).
int epsilon_of_vertex(const KrajewskiDiagram& K, int v);

// Checks every decoration rule; returns one message per violation, empty
// when the diagram is well formed.
std::vector<std::string> validate_diagram(const KrajewskiDiagram& K);

KrajewskiDiagram load_diagram_json(const std::string& json_text);
std::string diagram_to_json(const KrajewskiDiagram& K);

// Left representation of an algebra element: a_{i(v)} (x) 1 per vertex.
Mat represent(const KrajewskiDiagram& K, const AlgElement& a);
// Grading operator s(v) 1 per vertex (even KO dimensions only).
Mat grading(const KrajewskiDiagram& K);
// Real structure as a matrix R with J psi = R conj(psi): the signed swap
// of tensor factors onto the paired vertex.
Mat real_structure(const KrajewskiDiagram& K);
// Dirac operator assembled from the edge decorations.
Mat dirac(const KrajewskiDiagram& K);

// Lift of a Bratteli step to the Hilbert spaces: one matrix u(v,w) of shape
// alpha_{k(w) i(v)} x alpha_{l(w) j(v)} per vertex pair; an empty matrix
// stands for zero.
struct LiftData {
  BratteliStep step;
  std::vector<std::vector<Mat>> u;
};

// u(v,w) padded to its canonical shape (zero when absent).
Mat lift_block(const LiftData& lift, const KrajewskiDiagram& ka,
               const KrajewskiDiagram& kb, int v, int w);

// Isometry H_A -> H_B determined by a lift after re-basing the multiplicity
// spaces (so that the vertex Gram matrices sigma are diagonal) and
// rescaling each source sector by s_v^{-1/2}.
struct NormalizedPhiH {
  Mat phi;
  LiftData lift;                 // re-based, normalized matrices
  std::vector<double> s_norms;   // per-source-vertex norms before rescaling
  bool rebased = false;
};

NormalizedPhiH build_phiH(const LiftData& lift, const KrajewskiDiagram& ka,
                          const KrajewskiDiagram& kb);

enum class CompatMode { weak, strong };

struct CompatReport {
  bool ok = false;
  double residual = 0.0;
};

// Weak mode: phi(A psi) = B_phi^phi phi(psi); strong mode: phi(A psi) =
// B phi(psi) and the off-image block B_perp^phi vanishes.  The residual is
// the largest column norm of the defect over the standard basis of H_A.
CompatReport check_compat(const Mat& a, const Mat& b, const NormalizedPhiH& phiH,
                          CompatMode mode);

struct JCompatReport {
  bool ok = false;
  std::string violation;
};

// Entrywise check of u(Jv, Jw) = (eps_A(v) / eps_B(w)) u(v,w)^adjoint; the
// KO dimensions of the two diagrams must agree.
JCompatReport check_J_compat(const KrajewskiDiagram& ka, const KrajewskiDiagram& kb,
                             const LiftData& lift);

struct TraceCompare {
  cplx tr_a{0.0, 0.0};
  cplx tr_b{0.0, 0.0};
  cplx tnic{0.0, 0.0};  // cyclic block terms with at least one off-image leg
};

// tr(B_1...B_n) = tr(A_1...A_n) + tnic for weakly compatible pairs; tnic is
// accumulated explicitly over the 2^n - 1 non-inherited block sequences.
TraceCompare trace_compare(const std::vector<std::pair<Mat, Mat>>& pairs,
                           const NormalizedPhiH& phiH);

}  // namespace ncaf
