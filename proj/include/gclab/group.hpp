#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gclab {

class RandomStream;
class Group;
using GroupRef = std::shared_ptr<const Group>;

enum class GroupKind { Cyclic, Bits, Symmetric, Product };

/// A group element is its parent group plus a canonical index in
/// [0, order).  The descriptor must outlive every element that points
/// at it; factories hand out shared_ptrs so callers just keep one.
struct Element {
  const Group* group = nullptr;
  std::uint64_t index = 0;
};

bool operator==(const Element& a, const Element& b);
inline bool operator!=(const Element& a, const Element& b) { return !(a == b); }

/// Finite group descriptor: Z_N, bit strings under XOR, S_n, or a direct
/// product of two groups.  Immutable after construction.
///
/// Canonical index conventions:
///  - Cyclic:    index = residue
///  - Bits:      big-endian bit vector, index([1,0,1]) = 5
///  - Symmetric: Lehmer code rank = lexicographic rank of one-line notation
///  - Product:   index = left_index * |right| + right_index
class Group {
 public:
  static GroupRef zmod(std::uint64_t modulus);
  static GroupRef bits(std::uint64_t dimension);
  static GroupRef sym(std::uint64_t degree);
  static GroupRef prod(GroupRef left, GroupRef right);

  /// Parses "zmod:<N>", "bits:<n>", "sym:<n>", "prod:<item>,<item>" where
  /// an item is an atomic spec or a parenthesized spec.  Nested products
  /// must be parenthesized: "prod:(prod:zmod:2,zmod:2),sym:3".
  static GroupRef parse(std::string_view spec);

  GroupKind kind() const { return kind_; }
  std::uint64_t order() const { return order_; }
  bool abelian() const { return abelian_; }
  /// Canonical spec string; parse(name()) reproduces the group.
  const std::string& name() const { return name_; }
  bool same(const Group& other) const;

  Element identity() const { return Element{this, identity_index()}; }
  std::uint64_t identity_index() const { return 0; }

  /// Element with the given canonical index; throws std::out_of_range.
  Element element(std::uint64_t index) const;

  Element op(const Element& a, const Element& b) const;
  Element inv(const Element& a) const;
  Element sample(RandomStream& rng) const;

  /// Throws std::invalid_argument / std::out_of_range unless a belongs here.
  void require_member(const Element& a, const char* who) const;

  /// All elements in canonical index order; throws std::length_error if
  /// the order exceeds the cap.
  std::vector<Element> enumerate(std::uint64_t cap = kEnumCap) const;

  // Index-level kernels for tight loops; no membership checks.
  std::uint64_t op_index(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t inv_index(std::uint64_t a) const;

  // Payload views.
  std::uint64_t residue(const Element& a) const;
  std::vector<int> bit_vector(const Element& a) const;
  std::vector<int> permutation(const Element& a) const;
  std::pair<Element, Element> components(const Element& a) const;
  Element compose_pair(const Element& left_part, const Element& right_part) const;

  const GroupRef& left() const;
  const GroupRef& right() const;
  /// Modulus, bit dimension, or permutation degree; 0 for products.
  std::uint64_t param() const { return param_; }

  static constexpr std::uint64_t kEnumCap = 1ULL << 20;

 private:
  Group() = default;
  void check_member(const Element& a, const char* who) const;

  GroupKind kind_ = GroupKind::Cyclic;
  std::uint64_t param_ = 0;
  GroupRef left_;
  GroupRef right_;
  std::uint64_t order_ = 0;
  bool abelian_ = true;
  std::string name_;
};

}  // namespace gclab
