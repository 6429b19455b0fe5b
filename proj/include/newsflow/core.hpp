#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace newsflow {

using ArticleId = std::uint32_t;
using UserId = std::uint32_t;

// Error taxonomy shared by every module. The CLI maps ConfigError to exit
// code 1 and DataError to exit code 2.
struct DegenerateVectorError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kNormTolerance = 1e-9;

/// Non-negative weights over topic categories. Used both for article topics
/// and for user interests.
class CategoryVector {
 public:
  CategoryVector() = default;
  explicit CategoryVector(std::vector<double> values);
  CategoryVector(std::initializer_list<double> values);

  static CategoryVector zeros(std::size_t n) { return CategoryVector(std::vector<double>(n, 0.0)); }
  static CategoryVector uniform(std::size_t n);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }

  double sum() const noexcept;
  bool is_normalized(double tol = kNormTolerance) const noexcept;

  // Element-wise accumulate; lengths must match.
  CategoryVector& operator+=(const CategoryVector& other);

  friend bool operator==(const CategoryVector&, const CategoryVector&) = default;

 private:
  std::vector<double> values_;
};

CategoryVector normalize(const CategoryVector& v);

// Dot product of an interest (or profile) with an article topic.
double evaluate(const CategoryVector& interest, const CategoryVector& topic);

// Same as evaluate() without the length check; n is the shared length.
inline double dot(const double* a, const double* b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

/// Shannon entropy in bits with 0*log(0) = 0. Throws ContractError when p is
/// not normalized.
double entropy(const CategoryVector& p);

// Entropy of a distribution given by raw counts (need not be normalized).
double entropy_of_counts(std::span<const double> counts);

// Overlap coefficient |A∩B| / min(|A|,|B|). Inputs must be sorted and
// duplicate-free. Two empty sets (or one empty set) give 0.
double simpson(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);
double simpson_from_counts(std::size_t shared, std::size_t size_a, std::size_t size_b) noexcept;

// |A∩B| / |A∪B|, same preconditions as simpson().
double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax_category(const CategoryVector& v);

std::string to_string(const CategoryVector& v);

}  // namespace newsflow
