#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <vector>

#include "gclab/group.hpp"
#include "gclab/oracles.hpp"

namespace gclab {

using Rational = boost::multiprecision::cpp_rational;

/// Probability distribution over a group's elements, indexed canonically.
/// Exact rational entries; sums to one unless a caller builds it otherwise.
struct Distribution {
  GroupRef group;
  std::vector<Rational> probs;
};

Distribution uniform_distribution(GroupRef g);
Distribution point_mass(GroupRef g, const Element& at);
Rational total_variation(const Distribution& a, const Distribution& b);

/// Per-round swap/scoot decision.  Evaluated at the round's canonical pair
/// representative; recorded bit sequences just ignore the argument.
using Decision = std::function<bool(const Element&)>;

struct ShuffleParams {
  std::vector<Element> keys;
  std::vector<Decision> decisions;
  std::size_t rounds() const { return keys.size(); }
};

/// Uniform keys plus an independent lazily sampled predicate per round.
ShuffleParams random_shuffle_params(GroupRef g, std::size_t rounds,
                                    const RandomStream& rng);
/// Fixed keys and one recorded decision bit per round.
ShuffleParams fixed_bit_params(std::vector<Element> keys,
                               const std::vector<bool>& bits);

/// One swap-or-not round on bit strings: pair X with key^X, decide at the
/// pair member with the larger index.
Element sn_round_bits(const Element& key, const Decision& decide,
                      const Element& x);

/// Swap-or-not shuffle over Z_N: round i pairs X with K_i - X.
Element sn_shuffle(const ShuffleParams& params, const Element& x);

/// Scoot-or-not shuffle over any finite group: round i moves x to k_i * x
/// when the round predicate accepts x' * x^-1 (which always equals k_i).
Element sc_shuffle(const ShuffleParams& params, const Element& x);

/// Exact inverse of sc_shuffle: rounds are undone in reverse order and the
/// predicate is evaluated at the inverse of x' * x^-1, recovering the
/// forward round's decision point.
Element sc_inverse(const ShuffleParams& params, const Element& x);

/// Distribution of a single tracked card after `rounds` rounds with uniform
/// keys and unbiased decisions, starting from `start`.  Each round the card
/// stays with probability 1/2 + 1/(2N) and moves to each other position
/// with probability 1/(2N); computed by powering that transition operator.
/// The same operator covers both shuffles above.
Distribution single_card_distribution(GroupRef g, std::size_t rounds,
                                      const Element& start);

/// NCPA mixing bound for an r-round shuffle on N cards with q queries.
double thm62_bound(double cards, double queries, double rounds);
/// CCA bound for the 2r-round composition; `rounds` is the half-count r.
double thm64_bound(double cards, double queries, double rounds);
/// Looser summary form with `rounds` the total round count.
double summary_mixing_bound(double cards, double queries, double rounds);

/// A keyed permutation with both directions materialized as callables.
struct Cipher {
  std::function<Element(const Element&)> forward;
  std::function<Element(const Element&)> inverse;
};

/// Two-sided composition used by the NCPA-to-CCA argument: the forward map
/// is inner.inverse(outer.forward(x)), so a CCA adversary against the
/// composite faces outer from the front and inner from the back.
Cipher compose_cipher(const Cipher& outer, const Cipher& inner);

}  // namespace gclab
