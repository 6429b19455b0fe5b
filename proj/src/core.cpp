#include "newsflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace newsflow {

CategoryVector::CategoryVector(std::vector<double> values) : values_(std::move(values)) {
  for (double x : values_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("CategoryVector entries must be finite and non-negative");
    }
  }
}

CategoryVector::CategoryVector(std::initializer_list<double> values)
    : CategoryVector(std::vector<double>(values)) {}

CategoryVector CategoryVector::uniform(std::size_t n) {
  return CategoryVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double CategoryVector::sum() const noexcept {
  double s = 0.0;
  for (double x : values_) s += x;
  return s;
}

bool CategoryVector::is_normalized(double tol) const noexcept {
  return !values_.empty() && std::abs(sum() - 1.0) <= tol;
}

CategoryVector& CategoryVector::operator+=(const CategoryVector& other) {
  if (other.size() != size()) throw DimensionError("CategoryVector length mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

CategoryVector normalize(const CategoryVector& v) {
  const double s = v.sum();
  if (!(s > 0.0)) throw DegenerateVectorError("cannot normalize an all-zero vector");
  std::vector<double> out(v.values().begin(), v.values().end());
  for (double& x : out) x /= s;
  return CategoryVector(std::move(out));
}

double evaluate(const CategoryVector& interest, const CategoryVector& topic) {
  if (interest.size() != topic.size()) {
    throw DimensionError("evaluate: interest has " + std::to_string(interest.size()) +
                         " categories, topic has " + std::to_string(topic.size()));
  }
  return dot(interest.data(), topic.data(), interest.size());
}

double entropy(const CategoryVector& p) {
  if (!p.is_normalized(1e-6)) {
    throw ContractError("entropy requires a normalized distribution (sum=" + std::to_string(p.sum()) + ")");
  }
  double h = 0.0;
  for (double x : p.values()) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return std::max(h, 0.0);
}

double entropy_of_counts(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (!(total > 0.0)) throw DegenerateVectorError("entropy of empty count vector");
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return std::max(h, 0.0);
}

namespace {

std::size_t intersection_size(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::size_t shared = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++shared;
      ++ia;
      ++ib;
    }
  }
  return shared;
}

}  // namespace

double simpson_from_counts(std::size_t shared, std::size_t size_a, std::size_t size_b) noexcept {
  const std::size_t denom = std::min(size_a, size_b);
  if (denom == 0) return 0.0;
  return static_cast<double>(shared) / static_cast<double>(denom);
}

double simpson(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  return simpson_from_counts(intersection_size(a, b), a.size(), b.size());
}

double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  const std::size_t shared = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - shared;
  return uni == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(uni);
}

std::size_t argmax_category(const CategoryVector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::string to_string(const CategoryVector& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

}  // namespace newsflow
