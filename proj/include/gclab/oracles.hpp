#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gclab/group.hpp"
#include "gclab/rng.hpp"

namespace gclab {

/// Uniform random permutation of a group's element set, sampled lazily.
/// Maintains mutually inverse partial maps; both directions may be queried
/// and answers stay consistent.  Fresh values are exactly uniform over the
/// unused part of the respective side: rejection sampling while the tables
/// are sparse, and a maintained free list once more than half of a group of
/// order <= 2^20 has been used (rejection would stall near exhaustion).
class LazyPermutation {
 public:
  LazyPermutation(GroupRef group, RandomStream rng);

  Element eval(const Element& x);
  Element inv_eval(const Element& y);

  const Group& group() const { return *group_; }
  std::size_t defined_count() const { return fwd_.size(); }

 private:
  std::uint64_t fresh_value(const std::unordered_map<std::uint64_t, std::uint64_t>& used,
                            std::vector<std::uint64_t>& free_list);
  void insert_pair(std::uint64_t x, std::uint64_t y);
  void materialize_free_lists();

  GroupRef group_;
  RandomStream rng_;
  std::unordered_map<std::uint64_t, std::uint64_t> fwd_;
  std::unordered_map<std::uint64_t, std::uint64_t> bwd_;
  bool materialized_ = false;
  std::vector<std::uint64_t> free_cod_;  // codomain values not yet images
  std::vector<std::uint64_t> free_dom_;  // domain values not yet preimages
};

/// Uniform random function between two groups, sampled lazily.
class LazyFunction {
 public:
  LazyFunction(GroupRef domain, GroupRef codomain, RandomStream rng);

  Element eval(const Element& x);

  const Group& domain() const { return *domain_; }
  const Group& codomain() const { return *codomain_; }
  std::size_t defined_count() const { return table_.size(); }

 private:
  GroupRef domain_;
  GroupRef codomain_;
  RandomStream rng_;
  std::unordered_map<std::uint64_t, std::uint64_t> table_;
};

/// Uniform random predicate on a group, sampled lazily.
class LazyBitFunction {
 public:
  LazyBitFunction(GroupRef domain, RandomStream rng);

  bool eval(const Element& x);

  const Group& domain() const { return *domain_; }
  std::size_t defined_count() const { return table_.size(); }

 private:
  GroupRef domain_;
  RandomStream rng_;
  std::unordered_map<std::uint64_t, bool> table_;
};

}  // namespace gclab
