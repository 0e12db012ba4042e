#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "gclab/rng.hpp"

using gclab::RandomStream;

TEST_CASE("same seed, label and counter reproduce the same outputs") {
  RandomStream a(42, "exp");
  RandomStream b(42, "exp");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.counter() == 100);
}

TEST_CASE("distinct labels give distinct streams") {
  RandomStream a(42, "exp/one");
  RandomStream b(42, "exp/two");
  int equal = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("distinct seeds give distinct streams") {
  RandomStream a(1, "exp");
  RandomStream b(2, "exp");
  int equal = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("fork composes labels and restarts the counter") {
  RandomStream parent(7, "root");
  parent.next_u64();
  RandomStream child = parent.fork("sub");
  CHECK(child.stream_label() == "root/sub");
  CHECK(child.counter() == 0);
  RandomStream direct(7, "root/sub");
  CHECK(child.next_u64() == direct.next_u64());
}

TEST_CASE("uniform_below is within 5 sigma of uniform on residues mod 6") {
  RandomStream rng(2024, "chi");
  const int n = 60000;
  std::vector<int> counts(6, 0);
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_below(6)];
  const double expect = n / 6.0;
  const double sigma = std::sqrt(n * (1.0 / 6) * (5.0 / 6));
  for (int r = 0; r < 6; ++r)
    CHECK(std::abs(counts[r] - expect) < 5 * sigma);
}

TEST_CASE("uniform_below covers small ranges exactly") {
  RandomStream rng(5, "cover");
  std::vector<bool> seen(5, false);
  for (int i = 0; i < 200; ++i) seen[rng.uniform_below(5)] = true;
  for (bool s : seen) CHECK(s);
  CHECK(rng.uniform_below(1) == 0);
  CHECK_THROWS_AS(rng.uniform_below(0), std::invalid_argument);
}

TEST_CASE("bits are roughly balanced") {
  RandomStream rng(99, "bits");
  int ones = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) ones += rng.next_bit() ? 1 : 0;
  const double sigma = std::sqrt(n * 0.25);
  CHECK(std::abs(ones - n / 2.0) < 5 * sigma);
}
