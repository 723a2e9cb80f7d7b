// Constrained minimization of the Higgs potential over the free directions,
// lambda-path sweeps with warm starts, discontinuity detection by bisection,
// and the four built-in experiments behind the discontinuity table.
#pragma once

#include "ncgft.h"

#include <cstdint>
#include <optional>

namespace ncaf {

struct MinimizerConfig {
  int restarts = 32;
  double scale = 1.0;
  int maxiter = 2000;
  double gtol = 1e-9;
  bool warm_start = true;
  int threads = 1;
};

// Deterministic stream: every restart draws from a key mixed out of
// (seed, case, point, restart), so reruns are byte-identical.
uint64_t mix_key(uint64_t seed, uint64_t case_idx, uint64_t point_idx, uint64_t restart_idx);
double uniform_pm(uint64_t& state);  // uniform in [-1, 1], splitmix64 stream

// Real-coordinate evaluator for one target factor: rows are directions, the
// trailing column is the trace coordinate; inherited rows stay frozen.
class FactorEngine {
 public:
  FactorEngine(const Frame& frame, int k);

  int dirs() const { return nj_; }
  int inherited() const { return ic_; }
  int free_rows() const { return nj_ - ic_; }
  int cols() const { return nj_ + 1; }

  double value(const Eigen::MatrixXd& b) const;
  double value_grad(const Eigen::MatrixXd& b, Eigen::MatrixXd& g_free) const;

  // Fields matrix from inherited coordinate rows plus a flat free block.
  Eigen::MatrixXd assemble(const Eigen::MatrixXd& inherited_rows,
                           const Eigen::VectorXd& free_flat) const;
  Eigen::VectorXd free_of(const Eigen::MatrixXd& b) const;

  ConnectionConfig to_config(const Eigen::MatrixXd& b, const Frame& frame, int k) const;
  Eigen::MatrixXd coords_of(const ConnectionConfig& conn, int k) const;

 private:
  int nj_, ic_, m_;
  struct Entry {
    int a, b, c;
    double v;
  };
  std::vector<Entry> nz_;                 // nonzero structure constants
  std::vector<std::vector<Entry>> by_mid_;  // bucketed by the middle index
  std::vector<Mat> basis_;                // frame directions, for round trips
};

struct MinimizeResult {
  double vmin = 0;
  bool converged = false;
  int iterations = 0;
  Eigen::MatrixXd coords;  // full fields matrix of the single target factor
};

// L-BFGS with backtracking line search over one factor's free block.
MinimizeResult lbfgs_minimize(const FactorEngine& eng, const Eigen::MatrixXd& inherited_rows,
                              const Eigen::VectorXd& start, const MinimizerConfig& mcfg);

// Source-level path point lambda (one value per source factor) mapped to the
// inherited coordinate rows of target factor k.
Eigen::MatrixXd inherited_rows_at(const AdaptedBasis& adapted, int k,
                                  const Eigen::VectorXd& lambda);

struct PointResult {
  Eigen::VectorXd lambda;
  double vmin = 0;
  bool converged = false;
  std::vector<MassLine> lines;
  std::vector<Eigen::MatrixXd> coords;  // best fields matrix per target factor
};

// Best over deterministic starts: optional warm coordinates first, then zero,
// the basis configuration, and seeded uniform draws; when vary_scale is set
// the draw scales cycle through {1/2, 1, 2} times the configured scale.
PointResult minimize_point(const AdaptedBasis& adapted, const Eigen::VectorXd& lambda,
                           const MinimizerConfig& mcfg, uint64_t seed, uint64_t case_idx,
                           uint64_t point_idx, int n_random, bool vary_scale,
                           const std::vector<std::vector<Eigen::MatrixXd>>* warm_list);

// Standalone minimize: zero + basis + (restarts - 2) random starts.
PointResult minimize(const AdaptedBasis& adapted, const Eigen::VectorXd& lambda,
                     const MinimizerConfig& mcfg, uint64_t seed);

enum class PathKind { diagonal, antidiagonal, grid };

struct SweepSpec {
  PathKind kind = PathKind::diagonal;
  double lo = 0, hi = 1;
  int samples = 201;
  double offset = 0.5;  // anti-diagonal level lambda1 + lambda2
  uint64_t seed = 1;
};

struct SweepResult {
  std::vector<PointResult> points;
};

Eigen::VectorXd lambda_at(const SweepSpec& spec, const AdaptedBasis& adapted, int idx,
                          int idx2 = 0);

// Forward pass with warm starting, then a backward pass that offers each
// point its right neighbour's minimizer; order-deterministic output.
SweepResult sweep(const AdaptedBasis& adapted, const SweepSpec& spec,
                  const MinimizerConfig& mcfg, uint64_t case_idx = 0);

// Label-resolved jump predicate between two grouped spectra.
bool spectra_jumped(const std::vector<MassLine>& s1, const std::vector<MassLine>& s2,
                    double tol = 0.05);

// Jump locations on a 1D sweep, bisected to bracket width 1e-3 with cold
// restarts at every midpoint, validated on the final bracket, deduplicated.
std::vector<double> detect_discontinuities(const AdaptedBasis& adapted,
                                           const SweepResult& result, const SweepSpec& spec,
                                           const MinimizerConfig& mcfg, uint64_t case_idx = 0);

struct CaseDef {
  std::string name;
  std::vector<int> ns;
  int m;
};

// The four built-in experiments in table row order.
const std::vector<CaseDef>& builtin_cases();
BratteliStep case_step(const CaseDef& c);

struct TableRow {
  std::string name;
  int n_ndof = 0, n_idof = 0;
  double r_dof = 0;
  std::optional<double> lambda_first, lambda_second;
  bool converged = true;
};

// Diagonal sweeps on [0,3] at step 0.005 for all built-in cases.
std::vector<TableRow> run_table(const MinimizerConfig& mcfg, uint64_t seed);

}  // namespace ncaf
