// Per-face systems of the orthant decomposition. For an index set alpha with
// k = |alpha| the face system asks for u >= 0 in R^k with
//   A_alpha u^{m-1} + q_alpha = 0   and   A_{alpha-bar, alpha} u^{m-1} + q_alpha-bar >= 0,
// in which case x = (u, 0) solves TCP(R^n_+, q, A).
#pragma once

#include "tcpkit/classifiers.hpp"
#include "tcpkit/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tcpkit::face {

/// Lattice size beyond which an inconclusive face is not refined further.
inline constexpr double kMaxRefinedLattice = 250000.0;

enum class FaceStatus { feasible, infeasible, inconclusive };

struct FaceOptions {
  int grid_resolution = 0;
  int multistarts = 8;
  int polish_iters = 200;
  int refinements = 3;
  std::uint64_t seed = 0;
  double system_tol = 1e-9;
  double slack_tol = 1e-8;
};

inline FaceOptions options_from(const SearchBudget& b) {
  FaceOptions o;
  o.grid_resolution = b.grid_resolution;
  o.multistarts = b.multistarts;
  o.polish_iters = b.polish_iters;
  o.refinements = b.refinements;
  o.seed = b.seed;
  return o;
}

struct FacePoint {
  VectorXd u;      ///< length |alpha|
  VectorXd slack;  ///< length |alpha-bar|
  double residual = 0.0;
};

struct FaceResult {
  FaceStatus status = FaceStatus::inconclusive;
  std::vector<FacePoint> points;
  /// Solutions of this face form a continuum; `points` holds representatives.
  bool continuum = false;
  std::string reason;
  long evaluations = 0;
};

FaceResult solve_face(const Tensor& a, const VectorXd& q, const IndexSet& alpha, const FaceOptions& opt);

struct SingularDirections {
  /// Unit vectors s >= 0 in R^k with A_alpha s^{m-1} = 0 and
  /// A_{alpha-bar, alpha} s^{m-1} >= 0.
  std::vector<VectorXd> directions;
  /// No further isolated directions exist (exact analysis or grid certificate).
  bool complete = false;
  bool continuum = false;
  long evaluations = 0;
};

SingularDirections singular_directions(const Tensor& a, const IndexSet& alpha, const FaceOptions& opt,
                                       int continuum_samples);

}  // namespace tcpkit::face
