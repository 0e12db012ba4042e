#include "gclab/feistel.hpp"

#include <stdexcept>

namespace gclab {

bool operator==(const FeistelState& a, const FeistelState& b) {
  return a.left == b.left && a.right == b.right;
}

namespace {

const Group& state_group(const FeistelState& s, const char* who) {
  if (s.left.group == nullptr || s.right.group == nullptr)
    throw std::invalid_argument(std::string(who) + ": state half has no group");
  if (!s.left.group->same(*s.right.group))
    throw std::invalid_argument(std::string(who) +
                                ": state halves in different groups (" +
                                s.left.group->name() + " vs " +
                                s.right.group->name() + ")");
  return *s.left.group;
}

}  // namespace

FeistelState feistel_round(const RoundFn& f, const FeistelState& s) {
  const Group& g = state_group(s, "feistel_round");
  return FeistelState{s.right, g.op(s.left, f(s.right))};
}

FeistelState feistel_round_inv(const RoundFn& f, const FeistelState& s) {
  const Group& g = state_group(s, "feistel_round_inv");
  const Element prev_right = s.left;
  const Element prev_left = g.op(s.right, g.inv(f(prev_right)));
  return FeistelState{prev_left, prev_right};
}

FeistelState feistel_encrypt(const FeistelSpec& spec, FeistelState s) {
  for (const RoundFn& f : spec.rounds) s = feistel_round(f, s);
  return s;
}

FeistelState feistel_decrypt(const FeistelSpec& spec, FeistelState s) {
  for (auto it = spec.rounds.rbegin(); it != spec.rounds.rend(); ++it)
    s = feistel_round_inv(*it, s);
  return s;
}

RoundFn lazy_round_fn(GroupRef group, RandomStream rng) {
  auto f = std::make_shared<LazyFunction>(group, group, std::move(rng));
  return shared_round_fn(std::move(f));
}

RoundFn shared_round_fn(std::shared_ptr<LazyFunction> f) {
  if (!f) throw std::invalid_argument("shared_round_fn: null function");
  return [f](const Element& x) { return f->eval(x); };
}

namespace {

FeistelState translate(const FeistelState& s, const PsiKey& k, bool inverse) {
  const Group& g = state_group(s, "psi");
  g.require_member(k.left, "psi key");
  g.require_member(k.right, "psi key");
  if (inverse)
    return FeistelState{g.op(s.left, g.inv(k.left)),
                        g.op(s.right, g.inv(k.right))};
  return FeistelState{g.op(s.left, k.left), g.op(s.right, k.right)};
}

FeistelSpec psi_spec(LazyFunction& f, LazyFunction& g) {
  RoundFn fr = [&f](const Element& x) { return f.eval(x); };
  RoundFn gr = [&g](const Element& x) { return g.eval(x); };
  return FeistelSpec{{gr, fr, fr, gr}};
}

}  // namespace

FeistelState psi_encrypt(LazyFunction& f, LazyFunction& g, const PsiKey& k,
                         const FeistelState& x) {
  return translate(feistel_encrypt(psi_spec(f, g), translate(x, k, false)), k,
                   false);
}

FeistelState psi_decrypt(LazyFunction& f, LazyFunction& g, const PsiKey& k,
                         const FeistelState& y) {
  return translate(feistel_decrypt(psi_spec(f, g), translate(y, k, true)), k,
                   true);
}

Element state_to_element(const Group& pair_group, const FeistelState& s) {
  if (pair_group.kind() != GroupKind::Product ||
      !pair_group.left()->same(*pair_group.right()))
    throw std::invalid_argument(
        "state_to_element: need a product group with equal factors, got " +
        pair_group.name());
  const Group& half = state_group(s, "state_to_element");
  if (!pair_group.left()->same(half))
    throw std::invalid_argument("state_to_element: state over " + half.name() +
                                " does not match factor " +
                                pair_group.left()->name());
  return pair_group.compose_pair(
      Element{pair_group.left().get(), s.left.index},
      Element{pair_group.right().get(), s.right.index});
}

FeistelState state_from_element(const Element& pair_elem) {
  if (pair_elem.group == nullptr)
    throw std::invalid_argument("state_from_element: element has no group");
  auto [l, r] = pair_elem.group->components(pair_elem);
  if (!l.group->same(*r.group))
    throw std::invalid_argument(
        "state_from_element: product factors differ in " +
        pair_elem.group->name());
  return FeistelState{l, r};
}

}  // namespace gclab
