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

#include "dppci/core.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace dppci {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Asymmetric: return "Asymmetric";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::SpectrumOutOfRange: return "SpectrumOutOfRange";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidIndexSet: return "InvalidIndexSet";
    case ErrorKind::OverlappingSets: return "OverlappingSets";
    case ErrorKind::EmptyQuerySet: return "EmptyQuerySet";
    case ErrorKind::InvalidQuery: return "InvalidQuery";
    case ErrorKind::SingularConditioningBlock: return "SingularConditioningBlock";
    case ErrorKind::GroundSetTooLarge: return "GroundSetTooLarge";
    case ErrorKind::ConditioningEventNegligible: return "ConditioningEventNegligible";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::FileNotFound: return "FileNotFound";
  }
  return "Unknown";
}

IndexSet IndexSet::from_zero_based(std::vector<int> members) {
  std::sort(members.begin(), members.end());
  if (!members.empty() && members.front() < 0) {
    throw Error(ErrorKind::InvalidIndexSet, "negative index in set");
  }
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw Error(ErrorKind::InvalidIndexSet, "duplicate index in set");
  }
  return IndexSet(std::move(members));
}

IndexSet IndexSet::from_one_based(const std::vector<int>& members) {
  std::vector<int> zero;
  zero.reserve(members.size());
  for (int m : members) {
    if (m < 1) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "index " + std::to_string(m) + " is not >= 1");
    }
    zero.push_back(m - 1);
  }
  return from_zero_based(std::move(zero));
}

IndexSet IndexSet::range(int n) {
  std::vector<int> all(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  return IndexSet(std::move(all));
}

IndexSet IndexSet::parse(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  auto trim = [&](std::string_view t) {
    while (!t.empty() && is_space(t.front())) t.remove_prefix(1);
    while (!t.empty() && is_space(t.back())) t.remove_suffix(1);
    return t;
  };
  std::vector<int> values;
  if (trim(text).empty()) return IndexSet();
  std::size_t pos = 0;
  while (true) {
    std::size_t end = text.find(',', pos);
    std::string_view token =
        trim(text.substr(pos, end == std::string_view::npos ? text.npos : end - pos));
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
      throw Error(ErrorKind::ParseError,
                  "bad index list entry '" + std::string(token) + "'");
    }
    values.push_back(value);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return from_one_based(values);
}

std::vector<int> IndexSet::one_based() const {
  std::vector<int> out(members_);
  for (int& m : out) ++m;
  return out;
}

bool IndexSet::contains(int i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

std::uint64_t IndexSet::mask() const {
  std::uint64_t bits = 0;
  for (int m : members_) {
    if (m >= 64) throw Error(ErrorKind::GroundSetTooLarge, "mask needs index < 64");
    bits |= std::uint64_t{1} << m;
  }
  return bits;
}

void IndexSet::check_within(int n) const {
  if (!members_.empty() && members_.back() >= n) {
    throw Error(ErrorKind::IndexOutOfRange,
                "index " + std::to_string(members_.back() + 1) +
                    " exceeds ground-set size " + std::to_string(n));
  }
}

IndexSet IndexSet::complement(int n) const {
  check_within(n);
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!contains(i)) out.push_back(i);
  }
  return IndexSet(std::move(out));
}

IndexSet IndexSet::unite(const IndexSet& other) const {
  std::vector<int> out;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                 other.members_.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet IndexSet::minus(const IndexSet& other) const {
  std::vector<int> out;
  std::set_difference(members_.begin(), members_.end(), other.members_.begin(),
                      other.members_.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

bool IndexSet::disjoint(const IndexSet& other) const {
  auto a = members_.begin();
  auto b = other.members_.begin();
  while (a != members_.end() && b != other.members_.end()) {
    if (*a == *b) return false;
    if (*a < *b) ++a; else ++b;
  }
  return true;
}

std::string IndexSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (k) os << ',';
    os << members_[k] + 1;
  }
  os << '}';
  return os.str();
}

void require_pairwise_disjoint(std::initializer_list<const IndexSet*> sets) {
  for (auto i = sets.begin(); i != sets.end(); ++i) {
    for (auto j = std::next(i); j != sets.end(); ++j) {
      if (!(*i)->disjoint(**j)) {
        throw Error(ErrorKind::OverlappingSets,
                    "sets " + (*i)->to_string() + " and " + (*j)->to_string() +
                        " overlap");
      }
    }
  }
}

void require_pairwise_disjoint(const std::vector<IndexSet>& sets) {
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      if (!sets[i].disjoint(sets[j])) {
        throw Error(ErrorKind::OverlappingSets,
                    "sets " + sets[i].to_string() + " and " + sets[j].to_string() +
                        " overlap");
      }
    }
  }
}

Event::Event(IndexSet include, IndexSet exclude)
    : include_(std::move(include)), exclude_(std::move(exclude)) {
  require_pairwise_disjoint({&include_, &exclude_});
}

Event Event::conjoin(const Event& other) const {
  return Event(include_.unite(other.include_), exclude_.unite(other.exclude_));
}

}  // namespace dppci
