// Complementary tensors, the image cones Tpos(K, A) = {A x^{m-1} : x in K},
// and membership of q in Q(R^n_+, A) through the union of complementary cones.
#pragma once

#include "tcpkit/classifiers.hpp"
#include "tcpkit/cone.hpp"
#include "tcpkit/tensor.hpp"

#include <optional>

namespace tcpkit {

/// C_A(alpha): -a_{i1 i2..im} when i2..im all lie in alpha, the unit tensor
/// on indices outside alpha, zero elsewhere. alpha may be empty.
Tensor complementary_tensor(const Tensor& a, const IndexSet& alpha);

/// Is y = A x^{m-1} for some x in K? `holds` carries x as witness and the fit
/// residual as certificate; `fails` carries the smallest distance found from
/// y/|y| to the rays spanned by A x^{m-1} over the basis.
Verdict tpos_contains(const PolyhedralCone& k, const Tensor& a, const VectorXd& y, const SearchBudget& budget = {});

enum class Membership { member, non_member, unknown };

const char* to_string(Membership m);

struct MembershipResult {
  Membership member = Membership::unknown;
  std::optional<IndexSet> alpha;
  /// u_alpha on alpha; (slack)^[1/(m-1)] off alpha.
  std::optional<VectorXd> u;
  double residual = 0.0;
  int subsets_examined = 0;
  /// Subsets whose face system could be neither solved nor excluded.
  int inconclusive = 0;
};

inline constexpr double kSystemTolerance = 1e-9;
inline constexpr double kSlackTolerance = 1e-8;

/// Walks all 2^n index sets by size, then lexicographically, and returns the
/// first one whose face system A_alpha u^{m-1} + q_alpha = 0, u >= 0 has
/// nonnegative off-face slack. n <= 12.
MembershipResult q_membership(const Tensor& a, const VectorXd& q, const SearchBudget& budget = {});

/// x = (u_alpha, 0). Throws std::logic_error for a result that is not a member.
VectorXd solution_from_membership(const MembershipResult& result, const Tensor& a, const VectorXd& q);

}  // namespace tcpkit
