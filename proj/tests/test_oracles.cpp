#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "gclab/group.hpp"
#include "gclab/oracles.hpp"
#include "gclab/rng.hpp"

using gclab::Element;
using gclab::Group;
using gclab::GroupRef;
using gclab::LazyBitFunction;
using gclab::LazyFunction;
using gclab::LazyPermutation;
using gclab::RandomStream;

TEST_CASE("lazy permutation answers are stable and mutually inverse") {
  GroupRef g = Group::zmod(97);
  LazyPermutation p(g, RandomStream(11, "perm"));
  const Element x = g->element(13);
  const Element y = p.eval(x);
  CHECK(p.eval(x) == y);
  CHECK(p.inv_eval(y) == x);
  const Element z = g->element(40);
  const Element w = p.inv_eval(z);
  CHECK(p.eval(w) == z);
  CHECK(p.defined_count() == 2);
}

TEST_CASE("exhausting a lazy permutation forward yields a bijection") {
  GroupRef g = Group::zmod(64);
  LazyPermutation p(g, RandomStream(5, "perm"));
  std::set<std::uint64_t> image;
  for (const Element& x : g->enumerate()) image.insert(p.eval(x).index);
  CHECK(image.size() == 64);
}

TEST_CASE("mixed-direction exhaustion stays consistent") {
  GroupRef g = Group::zmod(33);
  LazyPermutation p(g, RandomStream(6, "perm"));
  // Alternate directions so the free lists see stale entries.
  for (std::uint64_t i = 0; i < 33; ++i) {
    if (i % 2 == 0)
      p.eval(g->element(i));
    else
      p.inv_eval(g->element(i));
  }
  std::set<std::uint64_t> image;
  for (const Element& x : g->enumerate()) image.insert(p.eval(x).index);
  CHECK(image.size() == 33);
  for (const Element& x : g->enumerate()) CHECK(p.inv_eval(p.eval(x)) == x);
}

TEST_CASE("same stream settings rebuild the same permutation") {
  GroupRef g = Group::sym(4);
  LazyPermutation a(g, RandomStream(9, "p"));
  LazyPermutation b(g, RandomStream(9, "p"));
  for (const Element& x : g->enumerate()) CHECK(a.eval(x) == b.eval(x));
}

// The sampler draws every fresh answer uniformly from the unused values, so
// querying all inputs in order assigns probability 1/n! to each full table.
// The recursion below enumerates those choices exactly; the statistical part
// ties the implementation to the same rule.
namespace {

void enumerate_tables(std::vector<std::uint64_t>& prefix,
                      std::set<std::uint64_t>& used, std::uint64_t n,
                      std::map<std::vector<std::uint64_t>, double>& out,
                      double prob) {
  if (prefix.size() == n) {
    out[prefix] += prob;
    return;
  }
  const double share = prob / (n - prefix.size());
  for (std::uint64_t v = 0; v < n; ++v) {
    if (used.count(v)) continue;
    used.insert(v);
    prefix.push_back(v);
    enumerate_tables(prefix, used, n, out, share);
    prefix.pop_back();
    used.erase(v);
  }
}

}  // namespace

TEST_CASE("lazy sampling is distributed as a uniform random permutation") {
  std::map<std::vector<std::uint64_t>, double> model;
  std::vector<std::uint64_t> prefix;
  std::set<std::uint64_t> used;
  enumerate_tables(prefix, used, 4, model, 1.0);
  CHECK(model.size() == 24);
  for (const auto& [table, prob] : model) CHECK(prob == doctest::Approx(1.0 / 24));

  // Implementation side: frequency of each full table over many seeds.
  GroupRef g = Group::zmod(4);
  std::map<std::vector<std::uint64_t>, int> counts;
  const int trials = 24000;
  for (int s = 0; s < trials; ++s) {
    LazyPermutation p(g, RandomStream(1000 + s, "t"));
    std::vector<std::uint64_t> table;
    for (const Element& x : g->enumerate()) table.push_back(p.eval(x).index);
    ++counts[table];
  }
  CHECK(counts.size() == 24);
  const double expect = trials / 24.0;
  const double sigma = std::sqrt(trials * (1.0 / 24) * (23.0 / 24));
  for (const auto& [table, c] : counts) CHECK(std::abs(c - expect) < 5 * sigma);
}

TEST_CASE("lazy function repeats answers and covers the codomain uniformly") {
  GroupRef dom = Group::zmod(16);
  GroupRef cod = Group::zmod(6);
  LazyFunction f(dom, cod, RandomStream(3, "f"));
  const Element x = dom->element(7);
  CHECK(f.eval(x) == f.eval(x));

  std::vector<int> counts(6, 0);
  const int trials = 30000;
  for (int s = 0; s < trials; ++s) {
    LazyFunction fresh(dom, cod, RandomStream(s, "u"));
    ++counts[fresh.eval(x).index];
  }
  const double expect = trials / 6.0;
  const double sigma = std::sqrt(trials * (1.0 / 6) * (5.0 / 6));
  for (int c : counts) CHECK(std::abs(c - expect) < 5 * sigma);
}

TEST_CASE("lazy bit function is stable per input and balanced across streams") {
  GroupRef dom = Group::sym(3);
  LazyBitFunction f(dom, RandomStream(8, "b"));
  for (const Element& x : dom->enumerate()) CHECK(f.eval(x) == f.eval(x));

  int ones = 0;
  const int trials = 30000;
  for (int s = 0; s < trials; ++s) {
    LazyBitFunction fresh(dom, RandomStream(s, "b2"));
    ones += fresh.eval(dom->element(2)) ? 1 : 0;
  }
  CHECK(std::abs(ones - trials / 2.0) < 5 * std::sqrt(trials * 0.25));
}

TEST_CASE("oracles reject foreign elements") {
  GroupRef g = Group::zmod(5);
  GroupRef h = Group::zmod(7);
  LazyPermutation p(g, RandomStream(1, "p"));
  CHECK_THROWS_AS(p.eval(h->element(2)), std::invalid_argument);
  LazyFunction f(g, g, RandomStream(1, "f"));
  CHECK_THROWS_AS(f.eval(h->element(2)), std::invalid_argument);
}
