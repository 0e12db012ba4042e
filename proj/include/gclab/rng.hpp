#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gclab {

/// Counter-based deterministic random stream.
///
/// Every output is a pure function of (master_seed, stream_label, counter):
/// the label is folded into the seed with FNV-1a, and draw i returns the
/// splitmix64 finalizer applied to base + i * golden_gamma.  Streams with
/// distinct labels are independent for practical purposes and never share
/// state, so forked substreams can be consumed in any order.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::string stream_label);

  std::uint64_t next_u64();

  /// Unbiased draw from {0, ..., n-1} by rejection. n must be >= 1.
  std::uint64_t uniform_below(std::uint64_t n);

  bool next_bit();

  /// Derived stream with label "<label>/<sublabel>" and counter 0.
  RandomStream fork(std::string_view sublabel) const;

  std::uint64_t master_seed() const { return master_; }
  const std::string& stream_label() const { return label_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t master_;
  std::string label_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace gclab
