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

#include "dppci/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>

namespace dppci {

/// A DPP over a finite ground set, described by its marginal kernel K with
/// the L-ensemble kernel derived on first use.
///
/// Models produced by conditioning keep a label map from local positions to
/// the ground-set indices of the model they were derived from, so repeated
/// conditioning composes.
template <typename Scalar = double>
class DppModel {
 public:
  static DppModel from_marginal(MarginalKernel<Scalar> k, Tolerances tol = {}) {
    DppModel model(std::move(k), tol);
    return model;
  }

  static DppModel from_ensemble(const EnsembleKernel<Scalar>& l, Tolerances tol = {}) {
    DppModel model(k_from_l(l, tol.spectrum), tol);
    std::call_once(model.cache_->once, [&] { model.cache_->ensemble = l; });
    return model;
  }

  int n() const noexcept { return k_.n(); }
  const MarginalKernel<Scalar>& marginal() const noexcept { return k_; }
  const Tolerances& tolerances() const noexcept { return tol_; }

  /// L = (I - K)^{-1} - I, computed at most once and shared between copies.
  const EnsembleKernel<Scalar>& ensemble() const {
    std::call_once(cache_->once, [&] { cache_->ensemble = l_from_k(k_, tol_.spectrum); });
    return *cache_->ensemble;
  }

  /// labels()[local] is the index in the parent ground set.
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Maps parent-ground-set indices to local positions; throws
  /// IndexOutOfRange for an index that is not part of this model.
  IndexSet to_local(const IndexSet& parent) const {
    std::vector<int> local;
    local.reserve(parent.members().size());
    for (int p : parent) {
      auto it = std::lower_bound(labels_.begin(), labels_.end(), p);
      if (it == labels_.end() || *it != p) {
        throw Error(ErrorKind::IndexOutOfRange,
                    "index " + std::to_string(p + 1) + " is not in this model");
      }
      local.push_back(static_cast<int>(it - labels_.begin()));
    }
    return IndexSet::from_zero_based(std::move(local));
  }

  IndexSet to_parent(const IndexSet& local) const {
    local.check_within(n());
    std::vector<int> parent;
    parent.reserve(local.members().size());
    for (int i : local) parent.push_back(labels_[static_cast<std::size_t>(i)]);
    return IndexSet::from_zero_based(std::move(parent));
  }

  /// The model of the complementary process, kernel I - K.
  DppModel complement() const {
    DppModel out(complement_marginal(k_, tol_.spectrum), tol_);
    out.labels_ = labels_;
    return out;
  }

  /// Same kernel, relabelled. `labels` must be strictly increasing.
  DppModel with_labels(std::vector<int> labels) const {
    if (static_cast<int>(labels.size()) != n() ||
        std::adjacent_find(labels.begin(), labels.end(), std::greater_equal<>()) !=
            labels.end()) {
      throw Error(ErrorKind::InvalidIndexSet, "label map must be increasing of length n");
    }
    DppModel out = *this;
    out.labels_ = std::move(labels);
    return out;
  }

 private:
  struct Cache {
    std::once_flag once;
    std::optional<EnsembleKernel<Scalar>> ensemble;
  };

  DppModel(MarginalKernel<Scalar> k, Tolerances tol)
      : k_(std::move(k)), tol_(tol), cache_(std::make_shared<Cache>()),
        labels_(static_cast<std::size_t>(k_.n())) {
    std::iota(labels_.begin(), labels_.end(), 0);
  }

  MarginalKernel<Scalar> k_;
  Tolerances tol_;
  std::shared_ptr<Cache> cache_;
  std::vector<int> labels_;
};

using DppModeld = DppModel<double>;

/// Clamps roundoff just outside [0, 1]; larger violations are NumericalFailure.
template <typename Scalar>
Scalar clamp_probability(Scalar p, double tol) {
  if (!std::isfinite(static_cast<double>(p)) || p < -tol || p > 1 + tol) {
    std::ostringstream os;
    os.precision(17);
    os << "probability " << static_cast<double>(p) << " outside [0, 1]";
    throw Error(ErrorKind::NumericalFailure, os.str());
  }
  if (p < 0) return Scalar(0);
  if (p > 1) return Scalar(1);
  return p;
}

/// Pr(A subset of Y) = det K_A.
template <typename Scalar>
Scalar inclusion_prob(const DppModel<Scalar>& model, const IndexSet& a) {
  a.check_within(model.n());
  return clamp_probability(determinant(submatrix(model.marginal().sym(), a)),
                           model.tolerances().probability);
}

/// Pr(Y = A) = det L_A / det(L + I).
template <typename Scalar>
Scalar exact_prob(const DppModel<Scalar>& model, const IndexSet& a) {
  a.check_within(model.n());
  const auto& l = model.ensemble().matrix();
  const Scalar norm =
      determinant(MatrixX<Scalar>(l + MatrixX<Scalar>::Identity(l.rows(), l.cols())));
  return clamp_probability(determinant(block(l, a, a)) / norm,
                           model.tolerances().probability);
}

/// Pr(A subset of Y, B disjoint from Y) as (-1)^|B| det [[K_A, K_AB], [K_BA, K_B - I]].
/// The bordered matrix is indefinite, so a pivoted LU supplies the determinant.
template <typename Scalar>
Scalar mixed_prob(const DppModel<Scalar>& model, const Event& e) {
  const IndexSet& a = e.include();
  const IndexSet& b = e.exclude();
  a.check_within(model.n());
  b.check_within(model.n());
  const IndexSet both = a.unite(b);
  MatrixX<Scalar> bordered = block(model.marginal().matrix(), both, both);
  for (Eigen::Index k = 0; k < bordered.rows(); ++k) {
    if (b.contains(both[static_cast<std::size_t>(k)])) bordered(k, k) -= Scalar(1);
  }
  const Scalar sign = (b.size() % 2 == 0) ? Scalar(1) : Scalar(-1);
  return clamp_probability(sign * determinant(bordered), model.tolerances().probability);
}

/// Kernel of Y restricted to C^c given C subset of Y: the Schur complement K^C.
template <typename Scalar>
DppModel<Scalar> conditional_kernel_inclusion(const DppModel<Scalar>& model,
                                              const IndexSet& c) {
  c.check_within(model.n());
  if (c.empty()) return model;
  const auto& tol = model.tolerances();
  SymMatrix<Scalar> kc = schur_complement(model.marginal().sym(), c, tol.spectrum);
  return DppModel<Scalar>::from_marginal(validate_marginal(kc, tol.spectrum), tol)
      .with_labels(model.to_parent(c.complement(model.n())).members());
}

/// Kernel of Y restricted to C^c given C disjoint from Y: I - (I - K)^C.
template <typename Scalar>
DppModel<Scalar> conditional_kernel_exclusion(const DppModel<Scalar>& model,
                                              const IndexSet& c) {
  c.check_within(model.n());
  if (c.empty()) return model;
  const auto& tol = model.tolerances();
  const int n = model.n();
  const SymMatrix<Scalar> ik = SymMatrix<Scalar>::symmetrized(
      MatrixX<Scalar>::Identity(n, n) - model.marginal().matrix());
  const SymMatrix<Scalar> schur = schur_complement(ik, c, tol.spectrum);
  const auto m = schur.n();
  SymMatrix<Scalar> k = SymMatrix<Scalar>::symmetrized(
      MatrixX<Scalar>::Identity(m, m) - schur.matrix());
  return DppModel<Scalar>::from_marginal(validate_marginal(k, tol.spectrum), tol)
      .with_labels(model.to_parent(c.complement(n)).members());
}

/// Conditions on a whole event: exclusion first, then inclusion on the
/// resulting process. Sets are in this model's local positions.
template <typename Scalar>
DppModel<Scalar> condition_on(const DppModel<Scalar>& model, const Event& given) {
  DppModel<Scalar> excluded = conditional_kernel_exclusion(model, given.exclude());
  const IndexSet c = excluded.to_local(model.to_parent(given.include()));
  return conditional_kernel_inclusion(excluded, c);
}

}  // namespace dppci
