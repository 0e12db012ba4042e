#include "gclab/shuffles.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace gclab {

Distribution uniform_distribution(GroupRef g) {
  if (!g) throw std::invalid_argument("uniform_distribution: null group");
  if (g->order() > Group::kEnumCap)
    throw std::length_error("uniform_distribution: order above enumeration cap");
  Distribution d{g, {}};
  d.probs.assign(g->order(), Rational(1, g->order()));
  return d;
}

Distribution point_mass(GroupRef g, const Element& at) {
  if (!g) throw std::invalid_argument("point_mass: null group");
  g->require_member(at, "point_mass");
  if (g->order() > Group::kEnumCap)
    throw std::length_error("point_mass: order above enumeration cap");
  Distribution d{g, {}};
  d.probs.assign(g->order(), Rational(0));
  d.probs[at.index] = 1;
  return d;
}

Rational total_variation(const Distribution& a, const Distribution& b) {
  if (!a.group || !b.group || !a.group->same(*b.group))
    throw std::invalid_argument("total_variation: distributions over different groups");
  if (a.probs.size() != b.probs.size())
    throw std::invalid_argument("total_variation: size mismatch");
  Rational sum = 0;
  for (std::size_t i = 0; i < a.probs.size(); ++i)
    sum += abs(a.probs[i] - b.probs[i]);
  return sum / 2;
}

ShuffleParams random_shuffle_params(GroupRef g, std::size_t rounds,
                                    const RandomStream& rng) {
  if (!g) throw std::invalid_argument("random_shuffle_params: null group");
  ShuffleParams p;
  RandomStream keys = rng.fork("keys");
  for (std::size_t i = 0; i < rounds; ++i) {
    p.keys.push_back(g->sample(keys));
    auto f = std::make_shared<LazyBitFunction>(
        g, rng.fork("dec/" + std::to_string(i)));
    p.decisions.push_back([f](const Element& x) { return f->eval(x); });
  }
  return p;
}

ShuffleParams fixed_bit_params(std::vector<Element> keys,
                               const std::vector<bool>& bits) {
  if (keys.size() != bits.size())
    throw std::invalid_argument("fixed_bit_params: one bit per key required");
  ShuffleParams p;
  p.keys = std::move(keys);
  for (bool b : bits)
    p.decisions.push_back([b](const Element&) { return b; });
  return p;
}

namespace {

const Group& params_group(const ShuffleParams& params, const char* who) {
  if (params.keys.size() != params.decisions.size())
    throw std::invalid_argument(std::string(who) +
                                ": one decision per key required");
  if (params.keys.empty())
    throw std::invalid_argument(std::string(who) + ": zero rounds");
  const Group* g = params.keys.front().group;
  if (g == nullptr)
    throw std::invalid_argument(std::string(who) + ": key has no group");
  for (const Element& k : params.keys) g->require_member(k, who);
  return *g;
}

}  // namespace

Element sn_round_bits(const Element& key, const Decision& decide,
                      const Element& x) {
  if (x.group == nullptr || x.group->kind() != GroupKind::Bits)
    throw std::invalid_argument("sn_round_bits: state must be a bit string");
  const Group& g = *x.group;
  g.require_member(key, "sn_round_bits");
  const Element partner = g.op(key, x);
  const Element hat = partner.index > x.index ? partner : x;
  return decide(hat) ? partner : x;
}

Element sn_shuffle(const ShuffleParams& params, const Element& x) {
  const Group& g = params_group(params, "sn_shuffle");
  if (g.kind() != GroupKind::Cyclic)
    throw std::invalid_argument("sn_shuffle: defined over zmod groups, got " +
                                g.name());
  g.require_member(x, "sn_shuffle");
  Element cur = x;
  for (std::size_t i = 0; i < params.rounds(); ++i) {
    const Element partner = g.op(params.keys[i], g.inv(cur));  // K_i - X
    const Element hat = partner.index > cur.index ? partner : cur;
    if (params.decisions[i](hat)) cur = partner;
  }
  return cur;
}

Element sc_shuffle(const ShuffleParams& params, const Element& x) {
  const Group& g = params_group(params, "sc_shuffle");
  g.require_member(x, "sc_shuffle");
  Element cur = x;
  for (std::size_t i = 0; i < params.rounds(); ++i) {
    const Element moved = g.op(params.keys[i], cur);
    const Element hat = g.op(moved, g.inv(cur));  // always k_i
    if (params.decisions[i](hat)) cur = moved;
  }
  return cur;
}

Element sc_inverse(const ShuffleParams& params, const Element& x) {
  const Group& g = params_group(params, "sc_inverse");
  g.require_member(x, "sc_inverse");
  Element cur = x;
  for (std::size_t i = params.rounds(); i-- > 0;) {
    const Element moved = g.op(g.inv(params.keys[i]), cur);
    const Element hat = g.op(moved, g.inv(cur));  // always k_i^-1
    if (params.decisions[i](g.inv(hat))) cur = moved;
  }
  return cur;
}

Distribution single_card_distribution(GroupRef g, std::size_t rounds,
                                      const Element& start) {
  Distribution d = point_mass(g, start);
  const std::uint64_t n = g->order();
  for (std::size_t round = 0; round < rounds; ++round) {
    // One application of the transition operator.  With mass total m the
    // new value at y is p[y]*(1/2 + 1/(2N)) + (m - p[y])/(2N) = p[y]/2 + m/(2N).
    Rational mass = 0;
    for (const Rational& p : d.probs) mass += p;
    const Rational shift = mass / (2 * Rational(n));
    for (Rational& p : d.probs) p = p / 2 + shift;
  }
  return d;
}

namespace {

void check_bound_args(double cards, double queries, double rounds,
                      const char* who) {
  if (!(cards >= 1))
    throw std::invalid_argument(std::string(who) + ": need at least one card");
  if (!(queries >= 0) || !(queries <= cards))
    throw std::invalid_argument(std::string(who) +
                                ": queries must lie in [0, cards]");
  if (!(rounds >= 1))
    throw std::invalid_argument(std::string(who) + ": need at least one round");
}

}  // namespace

double thm62_bound(double cards, double queries, double rounds) {
  check_bound_args(cards, queries, rounds, "thm62_bound");
  const double ratio = (queries + cards) / (2 * cards);
  return 2 * std::pow(cards, 1.5) / (rounds + 2) *
         std::pow(ratio, rounds / 2 + 1);
}

double thm64_bound(double cards, double queries, double rounds) {
  check_bound_args(cards, queries, rounds, "thm64_bound");
  const double ratio = (queries + cards) / (2 * cards);
  return 4 * std::pow(cards, 1.5) / (rounds + 2) *
         std::pow(ratio, rounds / 2 + 1);
}

double summary_mixing_bound(double cards, double queries, double rounds) {
  check_bound_args(cards, queries, rounds, "summary_mixing_bound");
  const double ratio = (queries + cards) / (2 * cards);
  return 8 * std::pow(cards, 1.5) / (rounds + 4) *
         std::pow(ratio, rounds / 4 + 1);
}

Cipher compose_cipher(const Cipher& outer, const Cipher& inner) {
  if (!outer.forward || !outer.inverse || !inner.forward || !inner.inverse)
    throw std::invalid_argument("compose_cipher: missing direction");
  Cipher c;
  c.forward = [outer, inner](const Element& x) {
    return inner.inverse(outer.forward(x));
  };
  c.inverse = [outer, inner](const Element& y) {
    return outer.inverse(inner.forward(y));
  };
  return c;
}

}  // namespace gclab
