#pragma once

// Multivariate power series truncated at a total degree K.
//
// Coefficients are stored densely in graded order: all multi-indices of
// degree 0, then degree 1, and so on up to K. Within a degree, indices are
// ordered lexicographically by their leading component. A multi-index
// (c_0, ..., c_{N-1}) is ranked in O(N) with binomial counts, so lookups need
// no hashing and products can walk degree blocks directly.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crossing/error.hpp"

namespace crossing {

/// Vector of nonnegative counts aligned with the positions of a CrossingSet.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dims) : counts_(dims, 0) {}
  explicit MultiIndex(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {}
  MultiIndex(std::initializer_list<std::uint32_t> counts) : counts_(counts) {}

  static MultiIndex unit(std::size_t dims, std::size_t p) {
    MultiIndex m(dims);
    m.counts_[p] = 1;
    return m;
  }

  std::size_t dims() const noexcept { return counts_.size(); }
  std::uint32_t operator[](std::size_t p) const { return counts_[p]; }
  std::uint32_t& operator[](std::size_t p) { return counts_[p]; }
  std::span<const std::uint32_t> counts() const noexcept { return counts_; }

  std::uint64_t degree() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  }

  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex r = *this;
    for (std::size_t p = 0; p < counts_.size(); ++p) r.counts_[p] += o.counts_[p];
    return r;
  }

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<std::uint32_t> counts_;
};

/// Enumeration and ranking of all N-dimensional multi-indices of total degree
/// at most K.
class IndexSpace {
 public:
  IndexSpace(std::size_t dims, std::size_t order) : dims_(dims), order_(order) {
    if (dims == 0) fail(ErrorKind::kValidation, "series dimension must be positive");
    // upto_[n][d] = number of n-variable indices with degree <= d.
    upto_.assign(dims + 1, std::vector<std::uint64_t>(order + 1, 0));
    for (std::size_t d = 0; d <= order; ++d) upto_[0][d] = 1;
    for (std::size_t n = 1; n <= dims; ++n) {
      std::uint64_t acc = 0;
      for (std::size_t d = 0; d <= order; ++d) {
        // Indices of exact degree d in n variables = upto_[n-1][d].
        acc += upto_[n - 1][d];
        upto_[n][d] = acc;
      }
    }
    size_ = upto_[dims][order];
    degree_begin_.resize(order + 2);
    degree_begin_[0] = 0;
    for (std::size_t d = 0; d <= order; ++d) degree_begin_[d + 1] = upto_[dims][d];

    flat_.resize(size_ * dims_);
    std::vector<std::uint32_t> cur(dims_, 0);
    std::size_t r = 0;
    for (std::size_t d = 0; d <= order; ++d) {
      enumerate(cur, 0, d, r);
    }
  }

  std::size_t dims() const noexcept { return dims_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t size() const noexcept { return size_; }

  /// Ranks of degree d occupy [degree_begin(d), degree_begin(d + 1)).
  std::size_t degree_begin(std::size_t d) const { return degree_begin_[d]; }
  std::size_t degree_end(std::size_t d) const { return degree_begin_[d + 1]; }

  std::span<const std::uint32_t> counts(std::size_t rank) const {
    return {flat_.data() + rank * dims_, dims_};
  }

  MultiIndex index(std::size_t rank) const {
    auto c = counts(rank);
    return MultiIndex(std::vector<std::uint32_t>(c.begin(), c.end()));
  }

  /// Rank of a multi-index; the caller guarantees degree <= K.
  std::size_t rank(std::span<const std::uint32_t> c) const {
    std::uint64_t rem = 0;
    for (auto x : c) rem += x;
    std::size_t r = rem == 0 ? 0 : upto_[dims_][rem - 1];
    for (std::size_t p = 0; p + 1 < dims_; ++p) {
      // Indices of degree rem whose component p is below c[p] come first;
      // there are upto_[n][rem] - upto_[n][rem - c[p]] of them.
      const std::size_t n = dims_ - p - 1;
      r += upto_[n][rem] - upto_[n][rem - c[p]];
      rem -= c[p];
    }
    return r;
  }

  std::size_t rank(const MultiIndex& m) const { return rank(m.counts()); }

  bool contains(const MultiIndex& m) const {
    return m.dims() == dims_ && m.degree() <= order_;
  }

 private:
  void enumerate(std::vector<std::uint32_t>& cur, std::size_t p, std::size_t rem,
                 std::size_t& r) {
    if (p + 1 == dims_) {
      cur[p] = static_cast<std::uint32_t>(rem);
      std::copy(cur.begin(), cur.end(), flat_.begin() + r * dims_);
      ++r;
      return;
    }
    for (std::size_t lead = 0; lead <= rem; ++lead) {
      cur[p] = static_cast<std::uint32_t>(lead);
      enumerate(cur, p + 1, rem - lead, r);
    }
  }

  std::size_t dims_;
  std::size_t order_;
  std::size_t size_ = 0;
  std::vector<std::vector<std::uint64_t>> upto_;
  std::vector<std::size_t> degree_begin_;
  std::vector<std::uint32_t> flat_;
};

/// Power series in N variables truncated at total degree K.
template <class Real = double>
class TruncatedSeries {
 public:
  using value_type = Real;

  TruncatedSeries(std::size_t dims, std::size_t order)
      : space_(std::make_shared<const IndexSpace>(dims, order)),
        coeffs_(space_->size(), Real{0}) {}

  explicit TruncatedSeries(std::shared_ptr<const IndexSpace> space)
      : space_(std::move(space)), coeffs_(space_->size(), Real{0}) {}

  static TruncatedSeries unit(std::size_t dims, std::size_t order) {
    TruncatedSeries s(dims, order);
    s.coeffs_[0] = Real{1};
    return s;
  }

  static TruncatedSeries unit_like(const TruncatedSeries& other) {
    TruncatedSeries s(other.space_);
    s.coeffs_[0] = Real{1};
    return s;
  }

  std::size_t dims() const noexcept { return space_->dims(); }
  std::size_t order() const noexcept { return space_->order(); }
  const IndexSpace& space() const noexcept { return *space_; }
  const std::shared_ptr<const IndexSpace>& space_ptr() const noexcept { return space_; }

  /// Coefficient at `m`; zero beyond the truncation order.
  Real operator[](const MultiIndex& m) const {
    if (m.dims() != dims()) fail(ErrorKind::kValidation, "multi-index dimension mismatch");
    if (m.degree() > order()) return Real{0};
    return coeffs_[space_->rank(m)];
  }

  void set(const MultiIndex& m, Real value) {
    if (!space_->contains(m)) fail(ErrorKind::kValidation, "multi-index outside truncation");
    coeffs_[space_->rank(m)] = value;
  }

  Real at_rank(std::size_t r) const { return coeffs_[r]; }
  Real& at_rank(std::size_t r) { return coeffs_[r]; }
  std::span<const Real> data() const noexcept { return coeffs_; }
  std::span<Real> data() noexcept { return coeffs_; }

  Real constant() const { return coeffs_[0]; }

  /// Sum of all coefficients of total degree <= `degree`.
  Real partial_sum(std::size_t degree) const {
    degree = std::min(degree, order());
    Real acc{0};
    for (std::size_t r = 0; r < space_->degree_end(degree); ++r) acc += coeffs_[r];
    return acc;
  }

  Real sum() const { return partial_sum(order()); }

  /// Sum_l c_l v^l over the stored coefficients.
  Real evaluate(std::span<const Real> v) const {
    if (v.size() != dims()) fail(ErrorKind::kValidation, "evaluation point dimension mismatch");
    Real acc{0};
    for (std::size_t r = 0; r < coeffs_.size(); ++r) {
      if (coeffs_[r] == Real{0}) continue;
      Real term = coeffs_[r];
      auto c = space_->counts(r);
      for (std::size_t p = 0; p < c.size(); ++p) {
        for (std::uint32_t e = 0; e < c[p]; ++e) term *= v[p];
      }
      acc += term;
    }
    return acc;
  }

  /// Visit (index, coefficient) for every nonzero coefficient in graded order.
  template <class F>
  void for_each_nonzero(F&& f) const {
    for (std::size_t r = 0; r < coeffs_.size(); ++r) {
      if (coeffs_[r] != Real{0}) f(space_->index(r), coeffs_[r]);
    }
  }

  std::vector<std::pair<MultiIndex, Real>> entries() const {
    std::vector<std::pair<MultiIndex, Real>> out;
    for_each_nonzero([&](MultiIndex m, Real c) { out.emplace_back(std::move(m), c); });
    return out;
  }

  TruncatedSeries scaled(Real factor) const {
    TruncatedSeries r = *this;
    for (auto& c : r.coeffs_) c *= factor;
    return r;
  }

  /// Accumulate into `out` the degree-`d` block of a * b.
  /// `a` and `b` may be read partially: only blocks of degree <= d matter.
  static void accumulate_product_degree(const TruncatedSeries& a, const TruncatedSeries& b,
                                        std::size_t d, TruncatedSeries& out) {
    const IndexSpace& sp = *a.space_;
    const std::size_t n = sp.dims();
    std::vector<std::uint32_t> sum(n);
    for (std::size_t da = 0; da <= d; ++da) {
      const std::size_t db = d - da;
      for (std::size_t ra = sp.degree_begin(da); ra < sp.degree_end(da); ++ra) {
        const Real ca = a.coeffs_[ra];
        if (ca == Real{0}) continue;
        auto ia = sp.counts(ra);
        for (std::size_t rb = sp.degree_begin(db); rb < sp.degree_end(db); ++rb) {
          const Real cb = b.coeffs_[rb];
          if (cb == Real{0}) continue;
          auto ib = sp.counts(rb);
          for (std::size_t p = 0; p < n; ++p) sum[p] = ia[p] + ib[p];
          out.coeffs_[sp.rank(sum)] += ca * cb;
        }
      }
    }
  }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    check_compatible(a, b);
    TruncatedSeries out(a.space_);
    for (std::size_t d = 0; d <= a.order(); ++d) accumulate_product_degree(a, b, d, out);
    return out;
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    check_compatible(a, b);
    TruncatedSeries out = a;
    for (std::size_t r = 0; r < out.coeffs_.size(); ++r) out.coeffs_[r] += b.coeffs_[r];
    return out;
  }

 private:
  static void check_compatible(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.dims() != b.dims() || a.order() != b.order()) {
      fail(ErrorKind::kValidation, "series shapes differ");
    }
  }

  std::shared_ptr<const IndexSpace> space_;
  std::vector<Real> coeffs_;
};

using Series = TruncatedSeries<double>;

/// f^{*(j)}: coefficients of f^j, truncated at f's order. j = 0 gives the
/// unit series. Uses binary powering.
template <class Real>
TruncatedSeries<Real> convolution_power(const TruncatedSeries<Real>& f, unsigned j) {
  TruncatedSeries<Real> result = TruncatedSeries<Real>::unit_like(f);
  TruncatedSeries<Real> base = f;
  while (j > 0) {
    if (j & 1u) result = result * base;
    j >>= 1u;
    if (j > 0) base = base * base;
  }
  return result;
}

}  // namespace crossing
