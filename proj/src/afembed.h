// One Bratteli step phi: A = (+)M_{n_i} -> B = (+)M_{m_k}: the normalized
// block-diagonal embedding, the adapted basis of Der(B) split into inherited
// and complementary directions, and K_0 pushforward.
#pragma once

#include "liebasis.h"

namespace ncaf {

struct dimension_mismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BratteliStep {
  AlgebraShape shapeA, shapeB;
  Eigen::MatrixXi mult;          // s x r non-negative multiplicities alpha_{ki}
  std::vector<int> slack;        // n_{0,k} >= 0 per target factor

  // Diagonal start row of copy alpha (0-based) of factor i inside block k;
  // copies placed by increasing i then alpha, slack block last.
  int offset(int k, int i, int alpha) const {
    int off = 0;
    for (int j = 0; j < i; ++j) off += mult(k, j) * shapeA.dims[j];
    return off + alpha * shapeA.dims[i];
  }
  int slack_offset(int k) const {
    int off = 0;
    for (int j = 0; j < shapeA.factors(); ++j) off += mult(k, j) * shapeA.dims[j];
    return off;
  }
};

// Builds a step, deriving slack dimensions when absent, and validates
// m_k = n_{0,k} + sum_i alpha_{ki} n_i for every k.
BratteliStep make_step(const AlgebraShape& shapeA, const AlgebraShape& shapeB,
                       const Eigen::MatrixXi& mult, const std::vector<int>* slack = nullptr);
void validate_step(const BratteliStep& step);

BratteliStep load_step_json(const std::string& json_text);
std::string step_to_json(const BratteliStep& step);

// Composition of two steps is a step whose multiplicity matrix is the product.
BratteliStep compose_steps(const BratteliStep& first, const BratteliStep& second);

// Block-diagonal insertion of alpha_{ki} copies of each a_i; the slack block
// is zero, or the identity when unital_lift is set (unitaries map to unitaries).
AlgElement phi_apply(const BratteliStep& step, const AlgElement& a, bool unital_lift = false);

// Single-copy insertion of an n_i x n_i matrix into copy (k, i, alpha).
Mat phi_insert(const BratteliStep& step, int k, int i, int alpha, const Mat& x);

// Projector p_{n0} = 1_B - phi(1_A).
AlgElement slack_projector(const BratteliStep& step);

Eigen::VectorX<long long> k0_push(const BratteliStep& step,
                                  const Eigen::VectorX<long long>& v);

// Mass-line nomenclature: kind in {a,b,c,d,e}; factor is 1-based for a and c.
struct DirLabel {
  char kind = 'a';
  int factor = 0;
  bool operator==(const DirLabel&) const = default;
};
std::string label_str(const DirLabel& l);

// Ordered orthonormal anti-Hermitean direction frame on a target algebra:
// per factor a full basis of sl(m_k), inherited lifts first for adapted
// frames, with labels and real structure constants.
struct Frame {
  AlgebraShape shape;
  std::vector<std::vector<Mat>> dirs;
  std::vector<std::vector<DirLabel>> labels;
  std::vector<StructConst> C;
  std::vector<int> inherited_count;          // leading lifted directions per factor

  int count(int k) const { return static_cast<int>(dirs[k].size()); }
};

// The algebra's own generators viewed as a frame (nothing inherited).
Frame frame_of(const GeneratorBasis& basis);

struct AdaptedBasis {
  BratteliStep step;
  Frame frame;                                // on shapeB
  std::vector<std::array<int, 5>> family_sizes;  // per target factor

  struct InhIndex {
    int i, alpha, kappa;
  };
  std::vector<std::vector<InhIndex>> inherited_index;  // per k, parallel to leading dirs

  int inherited_count(int k) const { return frame.inherited_count[k]; }
  int complement_count(int k) const { return frame.count(k) - frame.inherited_count[k]; }
  // Position of lifted generator (i, alpha, kappa) inside factor k's frame.
  int inherited_pos(int k, int i, int alpha, int kappa) const;
};

// Inherited lifts ordered by (i, alpha, kappa); complement built from the five
// families in order (slack sl(n0); entries outside enveloping squares; entries
// between copies inside an enveloping square; copy-projector differences;
// cross-enveloping diagonals), Gram-Schmidt orthonormalized against everything
// already accepted. Throws when the dimension count fails.
AdaptedBasis adapted_basis(const BratteliStep& step, const GeneratorBasis& basisA);

}  // namespace ncaf
