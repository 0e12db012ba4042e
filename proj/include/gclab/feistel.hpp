#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "gclab/group.hpp"
#include "gclab/oracles.hpp"

namespace gclab {

/// State of a Feistel network over G x G.  Both halves live in the same
/// group; rounds never need the product structure, only the halves.
struct FeistelState {
  Element left;
  Element right;
};

bool operator==(const FeistelState& a, const FeistelState& b);

/// Round functions are opaque callables G -> G, so fixed formulas, lazily
/// sampled functions and keyed instances all fit the same interface.
using RoundFn = std::function<Element(const Element&)>;

struct FeistelSpec {
  std::vector<RoundFn> rounds;
};

/// One round: (x, y) -> (y, x * f(y)).
FeistelState feistel_round(const RoundFn& f, const FeistelState& s);
/// Inverse round: recovers (x, y) from (y, x * f(y)).
FeistelState feistel_round_inv(const RoundFn& f, const FeistelState& s);

FeistelState feistel_encrypt(const FeistelSpec& spec, FeistelState s);
FeistelState feistel_decrypt(const FeistelSpec& spec, FeistelState s);

/// Round function backed by a fresh lazily sampled uniform function; this
/// is the keyed-PRF model where each key selects an independent function.
RoundFn lazy_round_fn(GroupRef group, RandomStream rng);
/// Round function that evaluates a shared lazy function (kept alive here).
RoundFn shared_round_fn(std::shared_ptr<LazyFunction> f);

/// Key for the four-round construction below: one translation per half.
struct PsiKey {
  Element left;
  Element right;
};

/// Four-round Feistel with round order (g, f, f, g), whitened on both
/// sides by the coordinate-wise key: psi(x) = F_{g,f,f,g}(x * k) * k.
FeistelState psi_encrypt(LazyFunction& f, LazyFunction& g, const PsiKey& k,
                         const FeistelState& x);
FeistelState psi_decrypt(LazyFunction& f, LazyFunction& g, const PsiKey& k,
                         const FeistelState& y);

/// Conversions between a state over G and an element of a product group
/// whose factors both equal G.
Element state_to_element(const Group& pair_group, const FeistelState& s);
FeistelState state_from_element(const Element& pair_elem);

}  // namespace gclab
