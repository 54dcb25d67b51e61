// Search primitives shared by the classifiers and the per-face solvers.
#pragma once

#include "tcpkit/tensor.hpp"

#include <functional>
#include <vector>

namespace tcpkit::search {

/// Barycentric lattice {lambda in Delta_k : resolution * lambda integral},
/// enumerated from the first vertex (1, 0, ..., 0) downward in the first
/// coordinate, then the second, and so on.
std::vector<VectorXd> simplex_lattice(int k, int resolution);

/// Number of lattice points, C(resolution + k - 1, k - 1).
double lattice_size(int k, int resolution);

/// Default lattice resolution for a k-vertex simplex: 64 up to three
/// vertices, 16 for four, then the largest value keeping the lattice under
/// kMaxLatticePoints.
int default_resolution(int k);
inline constexpr double kMaxLatticePoints = 20000.0;

/// Largest change of `values` between lattice neighbours (points that differ
/// by moving one unit of mass between two coordinates). Serves as a
/// resolution-level modulus of continuity for grid certificates.
double max_neighbour_gap(const std::vector<VectorXd>& lattice, int resolution, const std::vector<double>& values);

/// Euclidean projection onto the probability simplex.
VectorXd project_simplex(const VectorXd& v);

struct LmProblem {
  /// Residual r(z) and its Jacobian dr/dz.
  std::function<VectorXd(const VectorXd&)> residual;
  std::function<MatrixXd(const VectorXd&)> jacobian;
  /// Optional map applied after each step (projection / renormalization).
  std::function<VectorXd(const VectorXd&)> project;
};

struct LmResult {
  VectorXd z;
  double residual_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Projected Levenberg-Marquardt: damped Gauss-Newton steps followed by the
/// projection, accepted only when the residual norm decreases.
LmResult levenberg_marquardt(const LmProblem& problem, VectorXd z0, int max_iters, double target = 1e-15);

/// Positively homogeneous function h of the given degree. The search
/// minimizes h(y) / |y|^degree over y = V lambda, lambda in the simplex.
struct HomogeneousObjective {
  int degree = 1;
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  /// When set, h = |residual| and polishing uses Levenberg-Marquardt.
  std::function<VectorXd(const VectorXd&)> residual;
  std::function<MatrixXd(const VectorXd&)> residual_jacobian;
};

struct ConeMinimum {
  double value = 0.0;
  VectorXd argmin;  ///< unit vector
  long evaluations = 0;
};

/// Lattice search over the generator simplex, then polish of the best
/// `multistarts` lattice points. Polished points replace the lattice minimum
/// only on strict improvement, so ties resolve to the first lattice point.
ConeMinimum minimize_on_generators(const MatrixXd& generators, const HomogeneousObjective& objective,
                                   int resolution, int multistarts, int polish_iters);

}  // namespace tcpkit::search
