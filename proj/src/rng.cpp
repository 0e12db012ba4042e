#include "gclab/rng.hpp"

#include <stdexcept>

namespace gclab {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer (Steele, Lea, Flood; public domain reference code).
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::string stream_label)
    : master_(master_seed), label_(std::move(stream_label)) {
  base_ = mix64(master_ + kGoldenGamma) ^ mix64(fnv1a(label_));
}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(base_ + counter_ * kGoldenGamma);
}

std::uint64_t RandomStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be >= 1");
  if (n == 1) return 0;
  // Rejection below the largest multiple of n keeps the draw exactly uniform.
  const std::uint64_t min_accept = (-n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t u = next_u64();
    if (u >= min_accept) return u % n;
  }
}

bool RandomStream::next_bit() { return (next_u64() & 1ULL) != 0; }

RandomStream RandomStream::fork(std::string_view sublabel) const {
  std::string child = label_;
  child += '/';
  child += sublabel;
  return RandomStream(master_, std::move(child));
}

}  // namespace gclab
