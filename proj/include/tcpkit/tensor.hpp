// Square tensors of order m and dimension n with sparse coordinate storage,
// plus the multilinear contractions used by the complementarity code.
//
// Indices are 0-based in memory. File formats use 1-based indices and convert
// at the boundary (see io.hpp).
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tcpkit {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

/// Sorted, duplicate-free subset of {0, ..., n-1}.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(int n, std::vector<int> members) : n_(n), members_(std::move(members)) {
    if (n < 0) throw std::invalid_argument("IndexSet: negative ambient dimension");
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
      throw std::invalid_argument("IndexSet: duplicate member");
    for (int i : members_)
      if (i < 0 || i >= n) throw std::invalid_argument("IndexSet: member out of range");
  }

  static IndexSet full(int n) {
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    return IndexSet(n, std::move(all));
  }
  static IndexSet none(int n) { return IndexSet(n, {}); }
  static IndexSet from_mask(int n, std::uint64_t mask) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1U) members.push_back(i);
    return IndexSet(n, std::move(members));
  }

  int ambient() const { return n_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool contains(int i) const { return std::binary_search(members_.begin(), members_.end(), i); }
  const std::vector<int>& members() const { return members_; }
  int operator[](int k) const { return members_[static_cast<std::size_t>(k)]; }

  IndexSet complement() const {
    std::vector<int> rest;
    for (int i = 0; i < n_; ++i)
      if (!contains(i)) rest.push_back(i);
    return IndexSet(n_, std::move(rest));
  }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (int i : members_) m |= std::uint64_t{1} << i;
    return m;
  }

  bool operator==(const IndexSet&) const = default;

 private:
  int n_ = 0;
  std::vector<int> members_;
};

/// All subsets of {0..n-1} ordered by cardinality, lexicographic within a
/// cardinality. Includes the empty set first.
inline std::vector<IndexSet> subsets_by_size(int n) {
  if (n > 30) throw std::invalid_argument("subsets_by_size: dimension too large");
  std::vector<IndexSet> out;
  out.reserve(std::size_t{1} << n);
  for (int k = 0; k <= n; ++k) {
    std::vector<int> pick(static_cast<std::size_t>(k));
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      out.emplace_back(n, pick);
      int j = k - 1;
      while (j >= 0 && pick[static_cast<std::size_t>(j)] == n - k + j) --j;
      if (j < 0) break;
      ++pick[static_cast<std::size_t>(j)];
      for (int l = j + 1; l < k; ++l)
        pick[static_cast<std::size_t>(l)] = pick[static_cast<std::size_t>(l - 1)] + 1;
    }
  }
  return out;
}

/// m-th order n-dimensional real square tensor. Only nonzero entries are
/// stored, sorted lexicographically by index. Immutable after construction.
template <typename Scalar>
class BasicTensor {
 public:
  struct Entry {
    std::vector<int> index;
    Scalar value;
  };

  BasicTensor() : BasicTensor(2, 1) {}

  BasicTensor(int order, int dim) : order_(order), dim_(dim) {
    if (order < 2) throw std::invalid_argument("tensor order must be at least 2");
    if (dim < 1) throw std::invalid_argument("tensor dimension must be at least 1");
  }

  BasicTensor(int order, int dim, std::vector<Entry> entries) : BasicTensor(order, dim) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const Entry& e = entries[k];
      if (static_cast<int>(e.index.size()) != order_)
        throw std::invalid_argument("tensor entry index has wrong length");
      for (int i : e.index)
        if (i < 0 || i >= dim_) throw std::invalid_argument("tensor entry index out of range");
      if (!std::isfinite(static_cast<double>(e.value)))
        throw std::invalid_argument("tensor entry value is not finite");
      if (k > 0 && entries[k - 1].index == e.index)
        throw std::invalid_argument("duplicate tensor entry index");
      if (e.value == Scalar(0)) continue;
      indices_.insert(indices_.end(), e.index.begin(), e.index.end());
      values_.push_back(e.value);
    }
  }

  /// Order-2 tensor from a square matrix.
  static BasicTensor from_matrix(const Matrix<Scalar>& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("from_matrix: matrix is not square");
    std::vector<Entry> es;
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j)
        if (a(i, j) != Scalar(0)) es.push_back({{i, j}, a(i, j)});
    return BasicTensor(2, static_cast<int>(a.rows()), std::move(es));
  }

  /// From n^m values in lexicographic (row-major) index order.
  static BasicTensor from_dense(int order, int dim, std::span<const Scalar> values) {
    std::size_t total = 1;
    for (int k = 0; k < order; ++k) total *= static_cast<std::size_t>(dim);
    if (values.size() != total) throw std::invalid_argument("from_dense: wrong number of values");
    std::vector<Entry> es;
    std::vector<int> idx(static_cast<std::size_t>(order), 0);
    for (std::size_t lin = 0; lin < total; ++lin) {
      if (values[lin] != Scalar(0)) es.push_back({idx, values[lin]});
      for (int p = order - 1; p >= 0; --p) {
        if (++idx[static_cast<std::size_t>(p)] < dim) break;
        idx[static_cast<std::size_t>(p)] = 0;
      }
    }
    return BasicTensor(order, dim, std::move(es));
  }

  int order() const { return order_; }
  int dim() const { return dim_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  std::span<const int> index(int k) const {
    return {indices_.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(order_),
            static_cast<std::size_t>(order_)};
  }
  Scalar value(int k) const { return values_[static_cast<std::size_t>(k)]; }

  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(values_.size());
    for (int k = 0; k < nnz(); ++k) {
      auto idx = index(k);
      out.push_back({std::vector<int>(idx.begin(), idx.end()), value(k)});
    }
    return out;
  }

  /// Entry lookup; absent entries read as zero.
  Scalar operator()(std::span<const int> idx) const {
    int lo = 0, hi = nnz();
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      auto m = index(mid);
      if (std::lexicographical_compare(m.begin(), m.end(), idx.begin(), idx.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < nnz()) {
      auto m = index(lo);
      if (std::equal(m.begin(), m.end(), idx.begin(), idx.end())) return value(lo);
    }
    return Scalar(0);
  }
  Scalar operator()(std::initializer_list<int> idx) const {
    return (*this)(std::span<const int>(idx.begin(), idx.size()));
  }

  /// n^m values in lexicographic index order.
  std::vector<Scalar> to_dense() const {
    std::size_t total = 1;
    for (int k = 0; k < order_; ++k) total *= static_cast<std::size_t>(dim_);
    std::vector<Scalar> out(total, Scalar(0));
    for (int k = 0; k < nnz(); ++k) {
      std::size_t lin = 0;
      for (int i : index(k)) lin = lin * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
      out[lin] = value(k);
    }
    return out;
  }

  /// Order-2 tensor as a dense matrix.
  Matrix<Scalar> to_matrix() const {
    if (order_ != 2) throw std::invalid_argument("to_matrix: tensor order is not 2");
    Matrix<Scalar> a = Matrix<Scalar>::Zero(dim_, dim_);
    for (int k = 0; k < nnz(); ++k) a(index(k)[0], index(k)[1]) = value(k);
    return a;
  }

  BasicTensor operator-() const { return scaled(Scalar(-1)); }

  BasicTensor scaled(Scalar t) const {
    BasicTensor out(order_, dim_);
    if (t == Scalar(0)) return out;
    out.indices_ = indices_;
    out.values_ = values_;
    for (auto& v : out.values_) v *= t;
    return out;
  }

  friend BasicTensor operator*(Scalar t, const BasicTensor& a) { return a.scaled(t); }

  friend BasicTensor operator+(const BasicTensor& a, const BasicTensor& b) {
    return merge(a, b, Scalar(1));
  }
  friend BasicTensor operator-(const BasicTensor& a, const BasicTensor& b) {
    return merge(a, b, Scalar(-1));
  }

  bool operator==(const BasicTensor& o) const {
    return order_ == o.order_ && dim_ == o.dim_ && indices_ == o.indices_ && values_ == o.values_;
  }

 private:
  static BasicTensor merge(const BasicTensor& a, const BasicTensor& b, Scalar sign) {
    check_same_shape(a, b);
    std::map<std::vector<int>, Scalar> acc;
    for (int k = 0; k < a.nnz(); ++k) {
      auto idx = a.index(k);
      acc[std::vector<int>(idx.begin(), idx.end())] += a.value(k);
    }
    for (int k = 0; k < b.nnz(); ++k) {
      auto idx = b.index(k);
      acc[std::vector<int>(idx.begin(), idx.end())] += sign * b.value(k);
    }
    std::vector<Entry> es;
    for (auto& [idx, v] : acc) es.push_back({idx, v});
    return BasicTensor(a.order_, a.dim_, std::move(es));
  }

 public:
  static void check_same_shape(const BasicTensor& a, const BasicTensor& b) {
    if (a.order_ != b.order_ || a.dim_ != b.dim_)
      throw std::invalid_argument("tensor shape mismatch");
  }

 private:
  int order_;
  int dim_;
  std::vector<int> indices_;
  std::vector<Scalar> values_;
};

using Tensor = BasicTensor<double>;

namespace detail {

// Above this many stored entries the contractions switch to Neumaier
// compensated summation.
inline constexpr int kCompensatedNnz = 10000;

template <typename Scalar>
struct Accumulator {
  explicit Accumulator(Eigen::Index size, bool compensated)
      : sum(Vector<Scalar>::Zero(size)), comp(compensated ? Vector<Scalar>::Zero(size) : Vector<Scalar>()),
        use_comp(compensated) {}

  void add(Eigen::Index i, Scalar v) {
    if (!use_comp) {
      sum[i] += v;
      return;
    }
    Scalar t = sum[i] + v;
    using std::abs;
    if (abs(sum[i]) >= abs(v))
      comp[i] += (sum[i] - t) + v;
    else
      comp[i] += (v - t) + sum[i];
    sum[i] = t;
  }

  Vector<Scalar> result() const { return use_comp ? Vector<Scalar>(sum + comp) : sum; }

  Vector<Scalar> sum;
  Vector<Scalar> comp;
  bool use_comp;
};

template <typename Scalar, typename Derived>
Vector<Scalar> checked_vector(const BasicTensor<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != a.dim())
    throw std::invalid_argument("dimension mismatch: vector length " + std::to_string(x.size()) +
                                " vs tensor dimension " + std::to_string(a.dim()));
  return x;
}

}  // namespace detail

/// A x^{m-1}: component i is the sum of a_{i i2..im} x_{i2} ... x_{im}.
template <typename Scalar, typename Derived>
Vector<Scalar> apply_m1(const BasicTensor<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  const Vector<Scalar> xv = detail::checked_vector(a, x);
  detail::Accumulator<Scalar> acc(a.dim(), a.nnz() > detail::kCompensatedNnz);
  for (int k = 0; k < a.nnz(); ++k) {
    auto idx = a.index(k);
    Scalar term = a.value(k);
    for (std::size_t p = 1; p < idx.size(); ++p) term *= xv[idx[p]];
    acc.add(idx[0], term);
  }
  return acc.result();
}

/// A x^m = <x, A x^{m-1}>.
template <typename Scalar, typename Derived>
Scalar apply_m(const BasicTensor<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  const Vector<Scalar> xv = detail::checked_vector(a, x);
  const Vector<Scalar> f = apply_m1(a, xv);
  Scalar s(0);
  for (Eigen::Index i = 0; i < xv.size(); ++i) s += xv[i] * f[i];
  return s;
}

/// A x^{m-2}: the n x n matrix with (i,j) entry sum of a_{i j i3..im} x_{i3}..x_{im}.
/// For m = 2 this is the matrix A itself.
template <typename Scalar, typename Derived>
Matrix<Scalar> apply_m2(const BasicTensor<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  const Vector<Scalar> xv = detail::checked_vector(a, x);
  Matrix<Scalar> out = Matrix<Scalar>::Zero(a.dim(), a.dim());
  for (int k = 0; k < a.nnz(); ++k) {
    auto idx = a.index(k);
    Scalar term = a.value(k);
    for (std::size_t p = 2; p < idx.size(); ++p) term *= xv[idx[p]];
    out(idx[0], idx[1]) += term;
  }
  return out;
}

/// Jacobian of x -> A x^{m-1} for an arbitrary (not necessarily
/// sub-symmetric) tensor. Equals (m-1) A x^{m-2} when A is sub-symmetric.
template <typename Scalar, typename Derived>
Matrix<Scalar> jacobian_m1(const BasicTensor<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  const Vector<Scalar> xv = detail::checked_vector(a, x);
  Matrix<Scalar> jac = Matrix<Scalar>::Zero(a.dim(), a.dim());
  const std::size_t m = static_cast<std::size_t>(a.order());
  for (int k = 0; k < a.nnz(); ++k) {
    auto idx = a.index(k);
    for (std::size_t p = 1; p < m; ++p) {
      Scalar term = a.value(k);
      for (std::size_t r = 1; r < m; ++r)
        if (r != p) term *= xv[idx[r]];
      jac(idx[0], idx[p]) += term;
    }
  }
  return jac;
}

/// Gradient of x -> A x^m.
template <typename Scalar, typename Derived>
Vector<Scalar> grad_apply_m(const BasicTensor<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  const Vector<Scalar> xv = detail::checked_vector(a, x);
  Vector<Scalar> g = Vector<Scalar>::Zero(a.dim());
  const std::size_t m = static_cast<std::size_t>(a.order());
  for (int k = 0; k < a.nnz(); ++k) {
    auto idx = a.index(k);
    for (std::size_t p = 0; p < m; ++p) {
      Scalar term = a.value(k);
      for (std::size_t r = 0; r < m; ++r)
        if (r != p) term *= xv[idx[r]];
      g[idx[p]] += term;
    }
  }
  return g;
}

/// Unit tensor: 1 on the superdiagonal i1 = ... = im, zero elsewhere.
template <typename Scalar = double>
BasicTensor<Scalar> unit_tensor(int order, int dim) {
  std::vector<typename BasicTensor<Scalar>::Entry> es;
  for (int i = 0; i < dim; ++i) es.push_back({std::vector<int>(static_cast<std::size_t>(order), i), Scalar(1)});
  return BasicTensor<Scalar>(order, dim, std::move(es));
}

/// Principal sub-tensor on alpha, re-indexed to 0..|alpha|-1.
template <typename Scalar>
BasicTensor<Scalar> principal_subtensor(const BasicTensor<Scalar>& a, const IndexSet& alpha) {
  if (alpha.empty()) throw std::invalid_argument("principal_subtensor: empty index set");
  if (alpha.ambient() != a.dim()) throw std::invalid_argument("principal_subtensor: index set dimension mismatch");
  std::vector<int> pos(static_cast<std::size_t>(a.dim()), -1);
  for (int k = 0; k < alpha.size(); ++k) pos[static_cast<std::size_t>(alpha[k])] = k;
  std::vector<typename BasicTensor<Scalar>::Entry> es;
  for (int k = 0; k < a.nnz(); ++k) {
    auto idx = a.index(k);
    std::vector<int> local;
    local.reserve(idx.size());
    for (int i : idx) {
      if (pos[static_cast<std::size_t>(i)] < 0) break;
      local.push_back(pos[static_cast<std::size_t>(i)]);
    }
    if (local.size() == idx.size()) es.push_back({std::move(local), a.value(k)});
  }
  return BasicTensor<Scalar>(a.order(), alpha.size(), std::move(es));
}

/// Off-diagonal block contraction: for each i1 outside alpha, the sum over
/// i2..im in alpha of a_{i1 i2..im} u_{i2}..u_{im}. u is indexed like alpha.
template <typename Scalar, typename Derived>
Vector<Scalar> apply_off(const BasicTensor<Scalar>& a, const IndexSet& alpha,
                         const Eigen::MatrixBase<Derived>& u) {
  if (alpha.ambient() != a.dim()) throw std::invalid_argument("apply_off: index set dimension mismatch");
  if (alpha.empty() || alpha.size() == a.dim())
    throw std::invalid_argument("apply_off: index set must be a nonempty proper subset");
  if (u.size() != alpha.size()) throw std::invalid_argument("apply_off: vector length must equal |alpha|");
  const Vector<Scalar> uv = u;
  const IndexSet rest = alpha.complement();
  std::vector<int> pos(static_cast<std::size_t>(a.dim()), -1);
  std::vector<int> rest_pos(static_cast<std::size_t>(a.dim()), -1);
  for (int k = 0; k < alpha.size(); ++k) pos[static_cast<std::size_t>(alpha[k])] = k;
  for (int k = 0; k < rest.size(); ++k) rest_pos[static_cast<std::size_t>(rest[k])] = k;
  Vector<Scalar> out = Vector<Scalar>::Zero(rest.size());
  for (int k = 0; k < a.nnz(); ++k) {
    auto idx = a.index(k);
    const int row = rest_pos[static_cast<std::size_t>(idx[0])];
    if (row < 0) continue;
    Scalar term = a.value(k);
    bool inside = true;
    for (std::size_t p = 1; p < idx.size() && inside; ++p) {
      const int c = pos[static_cast<std::size_t>(idx[p])];
      if (c < 0)
        inside = false;
      else
        term *= uv[c];
    }
    if (inside) out[row] += term;
  }
  return out;
}

/// Componentwise power x^[p]. Fractional powers need a nonnegative vector.
template <typename Derived>
Vector<typename Derived::Scalar> power_vec(const Eigen::MatrixBase<Derived>& x,
                                           typename Derived::Scalar p) {
  using Scalar = typename Derived::Scalar;
  using std::floor;
  using std::pow;
  if (p < Scalar(0)) throw std::invalid_argument("power_vec: negative exponent");
  const bool integral = floor(p) == p;
  Vector<Scalar> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!integral && x[i] < Scalar(0))
      throw std::invalid_argument("power_vec: negative component with fractional exponent");
    out[i] = pow(x[i], p);
  }
  return out;
}

namespace detail {

// Number of distinct orderings of a multiset of indices.
inline std::uint64_t distinct_permutations(std::vector<int> idx) {
  std::sort(idx.begin(), idx.end());
  std::uint64_t count = 1;
  std::uint64_t placed = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && idx[j] == idx[i]) ++j;
    for (std::size_t r = 1; r <= j - i; ++r) {
      ++placed;
      count = count * placed / r;
    }
    i = j;
  }
  return count;
}

// Groups entries by a canonical key (sorted positions [from, m)) and checks
// every group is fully populated with a single value.
template <typename Scalar>
bool invariant_under_permutations(const BasicTensor<Scalar>& a, std::size_t from) {
  struct Group {
    Scalar value;
    std::uint64_t count;
    bool consistent;
  };
  std::map<std::vector<int>, Group> groups;
  for (int k = 0; k < a.nnz(); ++k) {
    auto idx = a.index(k);
    std::vector<int> key(idx.begin(), idx.end());
    std::sort(key.begin() + static_cast<std::ptrdiff_t>(from), key.end());
    auto [it, inserted] = groups.try_emplace(key, Group{a.value(k), 0, true});
    it->second.count += 1;
    if (it->second.value != a.value(k)) it->second.consistent = false;
  }
  for (const auto& [key, g] : groups) {
    if (!g.consistent) return false;
    std::vector<int> tail(key.begin() + static_cast<std::ptrdiff_t>(from), key.end());
    if (g.count != distinct_permutations(tail)) return false;
  }
  return true;
}

}  // namespace detail

/// Entries invariant under every permutation of (i1, ..., im). Exact comparison.
template <typename Scalar>
bool is_symmetric(const BasicTensor<Scalar>& a) {
  return detail::invariant_under_permutations(a, 0);
}

/// Every slice a_{i, ., ..., .} invariant under permutations of (i2, ..., im).
template <typename Scalar>
bool is_subsymmetric(const BasicTensor<Scalar>& a) {
  return detail::invariant_under_permutations(a, 1);
}

/// Frobenius norm of A - B.
template <typename Scalar>
Scalar frobenius_distance(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  BasicTensor<Scalar>::check_same_shape(a, b);
  using std::sqrt;
  Scalar s(0);
  int i = 0, j = 0;
  while (i < a.nnz() || j < b.nnz()) {
    Scalar d;
    if (j >= b.nnz()) {
      d = a.value(i++);
    } else if (i >= a.nnz()) {
      d = b.value(j++);
    } else {
      auto ia = a.index(i);
      auto ib = b.index(j);
      if (std::equal(ia.begin(), ia.end(), ib.begin(), ib.end()))
        d = a.value(i++) - b.value(j++);
      else if (std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end()))
        d = a.value(i++);
      else
        d = b.value(j++);
    }
    s += d * d;
  }
  return sqrt(s);
}

template <typename Scalar>
Scalar frobenius_norm(const BasicTensor<Scalar>& a) {
  return frobenius_distance(a, BasicTensor<Scalar>(a.order(), a.dim()));
}

}  // namespace tcpkit
