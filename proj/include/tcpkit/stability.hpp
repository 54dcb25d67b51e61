// Empirical probes of solvability, stability and local uniqueness under
// perturbations of (q, A) and of the cone.
#pragma once

#include "tcpkit/classifiers.hpp"
#include "tcpkit/solver.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcpkit {

/// Thrown when a probe's hypotheses do not hold for the base instance.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PerturbationReport {
  std::string probe;
  int trials = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  /// Trials in which the probed event happened (solvable, nonsingular, ...).
  double solvable_fraction = 0.0;
  double max_solution_norm = 0.0;
  /// sup |x - xbar| / (|dq| + |dA|_F) over trials with a positive denominator.
  double error_ratio_max = 0.0;
  /// usc_probe: largest distance from a perturbed solution to SOL(base).
  double max_excursion = 0.0;
  /// unsolvable_neighborhood_probe / nonsingularity_openness_probe.
  std::optional<double> fraction;
  /// Per-trial seeds of trials where the event did not happen.
  std::vector<std::uint64_t> failures;
  int resamples = 0;  ///< copositivity redraws
  int shifts = 0;     ///< trials that fell back to the unit-tensor shift
  int skipped = 0;    ///< trials with a zero perturbation
  int unknown = 0;    ///< trials with an inconclusive solve
};

/// A perturbation (dq, dA) with |dq| + |dA|_F = radius.
struct Perturbation {
  VectorXd dq;
  Tensor da;
  double size() const;
};

enum class PerturbTarget { both, q_only, tensor_only };

/// Gaussian direction on the joint (q, dense A) space, rescaled so that
/// |dq| + |dA|_F = eps * U with U uniform in (0, 1].
Perturbation draw_perturbation(int order, int dim, double eps, std::uint64_t trial_seed,
                               PerturbTarget target = PerturbTarget::both);

/// Minimizes v^T (A xbar^{m-2}) v over unit v in T(xbar, K) intersected with
/// {v : v^T w = 0}, w = A xbar^{m-1} + q. holds when the minimum exceeds the
/// margin; an intersection equal to {0} holds with an infinite certificate.
/// The witness is the minimizing v. Throws std::invalid_argument when xbar
/// does not solve the instance at 1e-6.
Verdict local_uniqueness_certificate(const TcpInstance& inst, const VectorXd& xbar, const SearchBudget& budget = {});

/// Solvability of perturbed instances around a copositive base with q inside
/// the dual of S_A (checked). Perturbed tensors are redrawn until copositive,
/// at most 100 times, then shifted by eps times the unit tensor.
PerturbationReport perturb_existence(const TcpInstance& inst, double eps, int trials, std::uint64_t seed,
                                     const SearchBudget& budget = {});

/// Solutions of perturbed instances inside the ball of `radius` around xbar.
/// Requires local_uniqueness_certificate to hold at xbar.
PerturbationReport error_bound_probe(const TcpInstance& inst, const VectorXd& xbar, double radius, double eps,
                                     int trials, std::uint64_t seed, const SearchBudget& budget = {});

/// Distance from every perturbed solution to the base solution set. Requires a
/// K-regular base tensor.
PerturbationReport usc_probe(const TcpInstance& inst, double eps, int trials, std::uint64_t seed,
                             const SearchBudget& budget = {});

struct SequenceMember {
  TcpInstance instance;
  VectorXd x;
};

struct ClosednessResult {
  bool closed = false;
  double tolerance = 0.0;
  double limit_residual = 0.0;
};

/// Checks that the limit of a convergent sequence of solutions solves the
/// limit instance, with a tolerance grown from the sequence's residual tail.
/// Throws std::invalid_argument when a member is not a solution at 1e-7.
ClosednessResult graph_closedness_probe(const std::vector<SequenceMember>& sequence, const SequenceMember& limit);

/// Fraction of q-perturbations that remain outside Q(R^n_+, A). Requires a
/// certified non-member q and nonsingular principal sub-tensors.
PerturbationReport unsolvable_neighborhood_probe(const Tensor& a, const VectorXd& q, double eps, int trials,
                                                 std::uint64_t seed, const SearchBudget& budget = {});

/// Fraction of perturbed (K, A) that stay K-nonsingular. Generators of a
/// general cone are jittered by at most eps each.
PerturbationReport nonsingularity_openness_probe(const PolyhedralCone& k, const Tensor& a, double eps, int trials,
                                                 std::uint64_t seed, const SearchBudget& budget = {});

}  // namespace tcpkit
