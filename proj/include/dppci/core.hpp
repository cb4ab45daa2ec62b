// Copyright 2026 The dppci Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dppci {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = MatrixX<double>;
using VectorXd = VectorX<double>;

enum class ErrorKind {
  Asymmetric,
  NonFinite,
  NotSquare,
  SpectrumOutOfRange,
  NumericalFailure,
  IndexOutOfRange,
  InvalidIndexSet,
  OverlappingSets,
  EmptyQuerySet,
  InvalidQuery,
  SingularConditioningBlock,
  GroundSetTooLarge,
  ConditioningEventNegligible,
  ParseError,
  FileNotFound,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thresholds that turn the exact equalities of the theory into floating
/// point decisions.
struct Tolerances {
  /// Relative asymmetry accepted before a matrix is rejected.
  double symmetry = 1e-12;
  /// Margin for strict spectral inequalities (0 < K < I, 0 < L).
  double spectrum = 1e-10;
  /// Relative threshold for "entry equals zero", scaled by max |entry|.
  double zero = 1e-9;
  /// Roundoff allowed outside [0, 1] before a probability is an error.
  double probability = 1e-12;
};

/// Sorted, duplicate-free set of ground-set elements. Stored 0-based;
/// all textual forms are 1-based.
class IndexSet {
 public:
  IndexSet() = default;

  /// Throws InvalidIndexSet on duplicates or negative entries.
  static IndexSet from_zero_based(std::vector<int> members);
  static IndexSet from_one_based(const std::vector<int>& members);
  static IndexSet from_one_based(std::initializer_list<int> members) {
    return from_one_based(std::vector<int>(members));
  }
  static IndexSet range(int n);

  /// Parses "1,3,4" (1-based). Empty or all-whitespace text is the empty set.
  static IndexSet parse(std::string_view text);

  const std::vector<int>& members() const noexcept { return members_; }
  std::vector<int> one_based() const;
  Eigen::Index size() const noexcept {
    return static_cast<Eigen::Index>(members_.size());
  }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(int i) const;
  int operator[](std::size_t k) const { return members_[k]; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  /// Bit i set iff element i (0-based) is a member. Requires n <= 64.
  std::uint64_t mask() const;

  /// Throws IndexOutOfRange unless every member is < n.
  void check_within(int n) const;

  IndexSet complement(int n) const;
  IndexSet unite(const IndexSet& other) const;
  IndexSet minus(const IndexSet& other) const;
  bool disjoint(const IndexSet& other) const;

  /// "{1,3}" in 1-based notation.
  std::string to_string() const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  explicit IndexSet(std::vector<int> sorted) : members_(std::move(sorted)) {}
  std::vector<int> members_;
};

/// Throws OverlappingSets unless the sets are pairwise disjoint.
void require_pairwise_disjoint(std::initializer_list<const IndexSet*> sets);
void require_pairwise_disjoint(const std::vector<IndexSet>& sets);

/// The conjunction "include is a subset of Y and exclude misses Y".
class Event {
 public:
  Event() = default;
  Event(IndexSet include, IndexSet exclude);

  const IndexSet& include() const noexcept { return include_; }
  const IndexSet& exclude() const noexcept { return exclude_; }

  /// Both events at once; throws OverlappingSets if contradictory.
  Event conjoin(const Event& other) const;

 private:
  IndexSet include_;
  IndexSet exclude_;
};

/// Determinant with the 0x0 convention det = 1.
template <typename Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0) return Scalar(1);
  return Eigen::PartialPivLU<MatrixX<Scalar>>(m).determinant();
}

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  return m.cwiseAbs().maxCoeff();
}

}  // namespace dppci
