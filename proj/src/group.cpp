#include "gclab/group.hpp"

#include <array>
#include <stdexcept>

#include "gclab/rng.hpp"

namespace gclab {

namespace {

// 0! through 20!; 20! is the largest factorial below 2^64.
constexpr int kMaxSymDegree = 10;

std::uint64_t factorial(std::uint64_t n) {
  std::uint64_t f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

void lehmer_decode(std::uint64_t index, int degree, int* out) {
  // index = sum L[i] * (degree-1-i)!; extract digits least significant first.
  std::array<int, kMaxSymDegree> lehmer{};
  lehmer[degree - 1] = 0;
  for (int j = 1; j < degree; ++j) {
    lehmer[degree - 1 - j] = static_cast<int>(index % (j + 1));
    index /= (j + 1);
  }
  std::array<int, kMaxSymDegree> pool{};
  for (int i = 0; i < degree; ++i) pool[i] = i;
  int pool_size = degree;
  for (int i = 0; i < degree; ++i) {
    const int d = lehmer[i];
    out[i] = pool[d];
    for (int j = d; j < pool_size - 1; ++j) pool[j] = pool[j + 1];
    --pool_size;
  }
}

std::uint64_t lehmer_encode(const int* perm, int degree) {
  std::uint64_t index = 0;
  for (int i = 0; i < degree; ++i) {
    int smaller_after = 0;
    for (int j = i + 1; j < degree; ++j)
      if (perm[j] < perm[i]) ++smaller_after;
    index = index * (degree - i) + smaller_after;
  }
  return index;
}

std::string wrap_item(const Group& g) {
  if (g.kind() == GroupKind::Product) return "(" + g.name() + ")";
  return g.name();
}

struct SpecParser {
  std::string_view s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("group spec \"" + std::string(s) +
                                "\": " + what + " at position " +
                                std::to_string(pos));
  }

  bool consume_word(std::string_view w) {
    if (s.substr(pos, w.size()) == w) {
      pos += w.size();
      return true;
    }
    return false;
  }

  std::uint64_t parse_uint() {
    if (pos >= s.size() || s[pos] < '0' || s[pos] > '9')
      fail("expected a decimal integer");
    std::uint64_t v = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      const std::uint64_t digit = s[pos] - '0';
      if (v > (UINT64_MAX - digit) / 10) fail("integer overflows 64 bits");
      v = v * 10 + digit;
      ++pos;
    }
    return v;
  }

  GroupRef parse_group() {
    if (consume_word("zmod:")) return Group::zmod(parse_uint());
    if (consume_word("bits:")) return Group::bits(parse_uint());
    if (consume_word("sym:")) return Group::sym(parse_uint());
    if (consume_word("prod:")) {
      GroupRef left = parse_item();
      if (pos >= s.size() || s[pos] != ',') fail("expected ','");
      ++pos;
      GroupRef right = parse_item();
      return Group::prod(std::move(left), std::move(right));
    }
    fail("expected zmod:, bits:, sym: or prod:");
  }

  GroupRef parse_item() {
    if (pos < s.size() && s[pos] == '(') {
      ++pos;
      GroupRef g = parse_group();
      if (pos >= s.size() || s[pos] != ')') fail("expected ')'");
      ++pos;
      return g;
    }
    if (s.substr(pos, 5) == "prod:")
      fail("nested product must be parenthesized");
    return parse_group();
  }
};

}  // namespace

bool operator==(const Element& a, const Element& b) {
  if (a.group == nullptr || b.group == nullptr)
    return a.group == b.group && a.index == b.index;
  return a.index == b.index && a.group->same(*b.group);
}

GroupRef Group::zmod(std::uint64_t modulus) {
  if (modulus == 0) throw std::invalid_argument("zmod: modulus must be >= 1");
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::Cyclic;
  g->param_ = modulus;
  g->order_ = modulus;
  g->abelian_ = true;
  g->name_ = "zmod:" + std::to_string(modulus);
  return g;
}

GroupRef Group::bits(std::uint64_t dimension) {
  if (dimension < 1 || dimension > 63)
    throw std::invalid_argument("bits: dimension must be in [1, 63]");
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::Bits;
  g->param_ = dimension;
  g->order_ = 1ULL << dimension;
  g->abelian_ = true;
  g->name_ = "bits:" + std::to_string(dimension);
  return g;
}

GroupRef Group::sym(std::uint64_t degree) {
  if (degree < 1 || degree > kMaxSymDegree)
    throw std::invalid_argument("sym: degree must be in [1, " +
                                std::to_string(kMaxSymDegree) + "]");
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::Symmetric;
  g->param_ = degree;
  g->order_ = factorial(degree);
  g->abelian_ = degree <= 2;
  g->name_ = "sym:" + std::to_string(degree);
  return g;
}

GroupRef Group::prod(GroupRef left, GroupRef right) {
  if (!left || !right) throw std::invalid_argument("prod: null factor");
  const std::uint64_t lo = left->order();
  const std::uint64_t ro = right->order();
  if (ro != 0 && lo > UINT64_MAX / ro)
    throw std::invalid_argument("prod: order overflows 64 bits");
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = GroupKind::Product;
  g->order_ = lo * ro;
  g->abelian_ = left->abelian() && right->abelian();
  g->name_ = "prod:" + wrap_item(*left) + "," + wrap_item(*right);
  g->left_ = std::move(left);
  g->right_ = std::move(right);
  return g;
}

GroupRef Group::parse(std::string_view spec) {
  SpecParser p{spec};
  GroupRef g = p.parse_group();
  if (p.pos != spec.size()) p.fail("trailing characters");
  return g;
}

bool Group::same(const Group& other) const {
  if (this == &other) return true;
  if (kind_ != other.kind_ || param_ != other.param_) return false;
  if (kind_ == GroupKind::Product)
    return left_->same(*other.left_) && right_->same(*other.right_);
  return true;
}

void Group::require_member(const Element& a, const char* who) const {
  check_member(a, who);
}

void Group::check_member(const Element& a, const char* who) const {
  if (a.group == nullptr)
    throw std::invalid_argument(std::string(who) + ": element has no group");
  if (!a.group->same(*this))
    throw std::invalid_argument(std::string(who) + ": group mismatch (" +
                                a.group->name() + " vs " + name_ + ")");
  if (a.index >= order_)
    throw std::out_of_range(std::string(who) + ": index " +
                            std::to_string(a.index) + " outside " + name_);
}

Element Group::element(std::uint64_t index) const {
  if (index >= order_)
    throw std::out_of_range("element: index " + std::to_string(index) +
                            " outside " + name_ + " of order " +
                            std::to_string(order_));
  return Element{this, index};
}

Element Group::op(const Element& a, const Element& b) const {
  check_member(a, "op");
  check_member(b, "op");
  return Element{this, op_index(a.index, b.index)};
}

Element Group::inv(const Element& a) const {
  check_member(a, "inv");
  return Element{this, inv_index(a.index)};
}

Element Group::sample(RandomStream& rng) const {
  return Element{this, rng.uniform_below(order_)};
}

std::vector<Element> Group::enumerate(std::uint64_t cap) const {
  if (order_ > cap)
    throw std::length_error("enumerate: " + name_ + " has order " +
                            std::to_string(order_) + " above cap " +
                            std::to_string(cap));
  std::vector<Element> all;
  all.reserve(order_);
  for (std::uint64_t i = 0; i < order_; ++i) all.push_back(Element{this, i});
  return all;
}

std::uint64_t Group::op_index(std::uint64_t a, std::uint64_t b) const {
  switch (kind_) {
    case GroupKind::Cyclic: {
      const unsigned __int128 sum =
          static_cast<unsigned __int128>(a) + static_cast<unsigned __int128>(b);
      return static_cast<std::uint64_t>(sum % param_);
    }
    case GroupKind::Bits:
      return a ^ b;
    case GroupKind::Symmetric: {
      const int n = static_cast<int>(param_);
      int pa[kMaxSymDegree], pb[kMaxSymDegree], pc[kMaxSymDegree];
      lehmer_decode(a, n, pa);
      lehmer_decode(b, n, pb);
      // Composition acts right-to-left: (a ∘ b)(i) = a(b(i)).
      for (int i = 0; i < n; ++i) pc[i] = pa[pb[i]];
      return lehmer_encode(pc, n);
    }
    case GroupKind::Product: {
      const std::uint64_t ro = right_->order();
      const std::uint64_t l = left_->op_index(a / ro, b / ro);
      const std::uint64_t r = right_->op_index(a % ro, b % ro);
      return l * ro + r;
    }
  }
  throw std::logic_error("op_index: unknown group kind");
}

std::uint64_t Group::inv_index(std::uint64_t a) const {
  switch (kind_) {
    case GroupKind::Cyclic:
      return a == 0 ? 0 : param_ - a;
    case GroupKind::Bits:
      return a;
    case GroupKind::Symmetric: {
      const int n = static_cast<int>(param_);
      int p[kMaxSymDegree], q[kMaxSymDegree];
      lehmer_decode(a, n, p);
      for (int i = 0; i < n; ++i) q[p[i]] = i;
      return lehmer_encode(q, n);
    }
    case GroupKind::Product: {
      const std::uint64_t ro = right_->order();
      return left_->inv_index(a / ro) * ro + right_->inv_index(a % ro);
    }
  }
  throw std::logic_error("inv_index: unknown group kind");
}

std::uint64_t Group::residue(const Element& a) const {
  check_member(a, "residue");
  if (kind_ != GroupKind::Cyclic)
    throw std::invalid_argument("residue: " + name_ + " is not cyclic");
  return a.index;
}

std::vector<int> Group::bit_vector(const Element& a) const {
  check_member(a, "bit_vector");
  if (kind_ != GroupKind::Bits)
    throw std::invalid_argument("bit_vector: " + name_ +
                                " is not a bit-string group");
  const int n = static_cast<int>(param_);
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = (a.index >> (n - 1 - i)) & 1;
  return out;
}

std::vector<int> Group::permutation(const Element& a) const {
  check_member(a, "permutation");
  if (kind_ != GroupKind::Symmetric)
    throw std::invalid_argument("permutation: " + name_ + " is not symmetric");
  const int n = static_cast<int>(param_);
  int p[kMaxSymDegree];
  lehmer_decode(a.index, n, p);
  return std::vector<int>(p, p + n);
}

std::pair<Element, Element> Group::components(const Element& a) const {
  check_member(a, "components");
  if (kind_ != GroupKind::Product)
    throw std::invalid_argument("components: " + name_ + " is not a product");
  const std::uint64_t ro = right_->order();
  return {Element{left_.get(), a.index / ro}, Element{right_.get(), a.index % ro}};
}

Element Group::compose_pair(const Element& left_part,
                            const Element& right_part) const {
  if (kind_ != GroupKind::Product)
    throw std::invalid_argument("compose_pair: " + name_ + " is not a product");
  left_->check_member(left_part, "compose_pair");
  right_->check_member(right_part, "compose_pair");
  return Element{this, left_part.index * right_->order() + right_part.index};
}

const GroupRef& Group::left() const {
  if (kind_ != GroupKind::Product)
    throw std::invalid_argument("left: " + name_ + " is not a product");
  return left_;
}

const GroupRef& Group::right() const {
  if (kind_ != GroupKind::Product)
    throw std::invalid_argument("right: " + name_ + " is not a product");
  return right_;
}

}  // namespace gclab
