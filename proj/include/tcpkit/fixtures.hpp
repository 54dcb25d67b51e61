// Named tensors and cones used by the tests, the examples in the README and
// the command-line tool.
#pragma once

#include "tcpkit/cone.hpp"
#include "tcpkit/tensor.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tcpkit::fixtures {

/// m = 3, n = 2; A x^2 = (x2^2 + 2 x1 x2, x1^2 + 2 x1 x2). Symmetric, copositive,
/// nonsingular, not strictly copositive.
Tensor e1();
/// m = 3, n = 2; A x^2 = 2 x1 x2 (1, 1). Orthant-singular at (1, 0).
Tensor e2();
/// The 2 x 2 matrix [[1, -2], [1, -2]], orthant-singular.
Tensor e3_limit();
/// [[1, -2 - 1/l], [1, -2]], which tends to e3_limit() as l grows.
Tensor e3_member(int l);
/// (2 + 2l, l): e3_member(l) maps it to (1, 2) for every l.
VectorXd e3_point(int l);
/// m = 3, n = 2; A x^3 = (x1 + x2)(x1 - x2)^2. Copositive, not strictly,
/// not sub-symmetric, every principal sub-tensor nonsingular.
Tensor e4();

Tensor identity(int order, int dim);
Tensor negated_identity(int order, int dim);

enum class RandomKind { general, symmetric, subsymmetric, copositive_shifted };

/// Entries uniform in [lo, hi] from a SplitMix64 stream. The symmetric and
/// sub-symmetric variants draw one value per orbit. copositive_shifted adds
/// (sum of |entries|) times the unit tensor, which makes the result copositive.
Tensor random_tensor(RandomKind kind, int order, int dim, std::uint64_t seed, double lo = -2.0, double hi = 2.0);

/// Parses "E1".."E4", "E3" (the limit matrix), "E3:<l>", "identity<m><n>",
/// "negidentity<m><n>" and "random:<kind>:<m>:<n>:<seed>".
Tensor by_name(const std::string& name);
std::vector<std::string> names();

/// One concrete name for each pattern in names().
std::vector<std::string> sample_names();

/// Parses "orthant<n>", "ray<digits>" (each digit one coordinate, e.g. ray10),
/// and "wedge" (cone{(1,0),(1,1)}).
PolyhedralCone cone_by_name(const std::string& name);

/// Ten pairs of cones in dimensions 2 and 3 used for metric checks.
std::vector<std::pair<PolyhedralCone, PolyhedralCone>> cone_pairs();

}  // namespace tcpkit::fixtures
