// Finitely generated convex cones: generator (V) and inequality (H)
// representations, duality, projections, the unit-ball Hausdorff metric and
// tangent cones.
#pragma once

#include "tcpkit/tensor.hpp"

#include <cstdint>
#include <vector>

namespace tcpkit {

enum class ConeKind { orthant, general };

/// Largest dimension for which inequalities are derived from generators.
inline constexpr int kMaxGeneralConeDim = 6;

/// Cone {G lambda : lambda >= 0} = {x : H^T x >= 0}. Generators and
/// inequality normals are stored as unit-length columns.
class PolyhedralCone {
 public:
  PolyhedralCone() = default;

  static PolyhedralCone orthant(int n);

  /// Pointed cone spanned by the columns of `generators`. Redundant and
  /// repeated generators are dropped. Throws on zero generators, on a
  /// non-pointed result and on dimension > kMaxGeneralConeDim unless the
  /// generators are the standard basis.
  static PolyhedralCone from_generators(const MatrixXd& generators);

  /// {x : h^T x >= 0 for every column h}. May contain lines.
  static PolyhedralCone from_inequalities(int n, const MatrixXd& inequalities);

  int dim() const { return dim_; }
  ConeKind kind() const { return kind_; }
  bool is_orthant() const { return kind_ == ConeKind::orthant; }
  bool pointed() const { return pointed_; }
  const MatrixXd& generators() const { return generators_; }
  const MatrixXd& inequalities() const { return inequalities_; }

  bool operator==(const PolyhedralCone& o) const;

 private:
  friend PolyhedralCone dual(const PolyhedralCone& k);
  friend PolyhedralCone tangent_cone(const PolyhedralCone& k, const VectorXd& x, double tol);

  int dim_ = 0;
  ConeKind kind_ = ConeKind::general;
  bool pointed_ = true;
  MatrixXd generators_;
  MatrixXd inequalities_;
};

/// K* = {y : <y, x> >= 0 for all x in K}. The representations swap roles.
PolyhedralCone dual(const PolyhedralCone& k);

/// Generators (extreme rays plus a +/- basis of the lineality space) of
/// {y : g^T y >= 0 for every column g of G}, as unit columns.
MatrixXd dual_generators(int n, const MatrixXd& g);

/// Membership up to an absolute tolerance on every inequality.
bool contains(const PolyhedralCone& k, const VectorXd& x, double tol);

/// Euclidean projection onto K.
VectorXd project(const PolyhedralCone& k, const VectorXd& z);

/// dist(z, K) = min over u in K of |z - u|.
double dist(const PolyhedralCone& k, const VectorXd& z);

/// Nonnegative least squares: argmin |A x - b| subject to x >= 0 (Lawson-Hanson).
VectorXd nnls(const MatrixXd& a, const VectorXd& b);

/// Deterministic sample of unit vectors of K: every normalized generator,
/// then normalized random nonnegative generator combinations up to `count`.
std::vector<VectorXd> basis_samples(const PolyhedralCone& k, int count, std::uint64_t seed);

struct DeltaEstimate {
  double value = 0.0;
  int samples = 0;
};

/// Sampled estimate of the Hausdorff distance between K1 and K2 intersected
/// with the unit ball. The estimate is a lower bound whose error shrinks with
/// the covering radius of the sample.
DeltaEstimate delta_metric(const PolyhedralCone& k1, const PolyhedralCone& k2, int samples,
                           std::uint64_t seed = 0);

inline constexpr double kActiveTolerance = 1e-8;

/// Tangent cone of K at a point of K: the inequalities active at x.
PolyhedralCone tangent_cone(const PolyhedralCone& k, const VectorXd& x, double tol = kActiveTolerance);

}  // namespace tcpkit
