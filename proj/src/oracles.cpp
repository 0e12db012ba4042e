#include "gclab/oracles.hpp"

#include <stdexcept>

namespace gclab {

namespace {
constexpr std::uint64_t kMaterializeCap = 1ULL << 20;
}

LazyPermutation::LazyPermutation(GroupRef group, RandomStream rng)
    : group_(std::move(group)), rng_(std::move(rng)) {
  if (!group_) throw std::invalid_argument("LazyPermutation: null group");
}

void LazyPermutation::materialize_free_lists() {
  free_cod_.clear();
  free_dom_.clear();
  for (std::uint64_t v = 0; v < group_->order(); ++v) {
    if (!bwd_.count(v)) free_cod_.push_back(v);
    if (!fwd_.count(v)) free_dom_.push_back(v);
  }
  materialized_ = true;
}

std::uint64_t LazyPermutation::fresh_value(
    const std::unordered_map<std::uint64_t, std::uint64_t>& used,
    std::vector<std::uint64_t>& free_list) {
  const std::uint64_t order = group_->order();
  if (fwd_.size() >= order)
    throw std::logic_error("LazyPermutation: permutation exhausted on " +
                           group_->name());
  if (!materialized_ && order <= kMaterializeCap && fwd_.size() * 2 >= order)
    materialize_free_lists();
  if (materialized_) {
    // Free lists may hold stale entries (values consumed through the other
    // direction); those are discarded on contact.  Conditioned on landing on
    // a live entry the draw is uniform over the live entries, so the result
    // stays exactly uniform over the unused values.
    for (;;) {
      const std::size_t j = rng_.uniform_below(free_list.size());
      const std::uint64_t v = free_list[j];
      free_list[j] = free_list.back();
      free_list.pop_back();
      if (!used.count(v)) return v;
    }
  }
  // Tables hold fewer than half of the elements, so rejection terminates
  // after fewer than two draws in expectation and is exactly uniform over
  // the unused values.
  for (;;) {
    const std::uint64_t v = rng_.uniform_below(order);
    if (!used.count(v)) return v;
  }
}

void LazyPermutation::insert_pair(std::uint64_t x, std::uint64_t y) {
  fwd_.emplace(x, y);
  bwd_.emplace(y, x);
}

Element LazyPermutation::eval(const Element& x) {
  group_->require_member(x, "LazyPermutation::eval");
  auto it = fwd_.find(x.index);
  if (it != fwd_.end()) return group_->element(it->second);
  const std::uint64_t y = fresh_value(bwd_, free_cod_);
  insert_pair(x.index, y);
  return group_->element(y);
}

Element LazyPermutation::inv_eval(const Element& y) {
  group_->require_member(y, "LazyPermutation::inv_eval");
  auto it = bwd_.find(y.index);
  if (it != bwd_.end()) return group_->element(it->second);
  const std::uint64_t x = fresh_value(fwd_, free_dom_);
  insert_pair(x, y.index);
  return group_->element(x);
}

LazyFunction::LazyFunction(GroupRef domain, GroupRef codomain, RandomStream rng)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      rng_(std::move(rng)) {
  if (!domain_ || !codomain_)
    throw std::invalid_argument("LazyFunction: null group");
}

Element LazyFunction::eval(const Element& x) {
  domain_->require_member(x, "LazyFunction::eval");
  auto it = table_.find(x.index);
  if (it != table_.end()) return codomain_->element(it->second);
  const std::uint64_t y = rng_.uniform_below(codomain_->order());
  table_.emplace(x.index, y);
  return codomain_->element(y);
}

LazyBitFunction::LazyBitFunction(GroupRef domain, RandomStream rng)
    : domain_(std::move(domain)), rng_(std::move(rng)) {
  if (!domain_) throw std::invalid_argument("LazyBitFunction: null group");
}

bool LazyBitFunction::eval(const Element& x) {
  domain_->require_member(x, "LazyBitFunction::eval");
  auto it = table_.find(x.index);
  if (it != table_.end()) return it->second;
  const bool b = rng_.next_bit();
  table_.emplace(x.index, b);
  return b;
}

}  // namespace gclab
