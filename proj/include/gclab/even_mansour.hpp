#pragma once

#include <vector>

#include "gclab/group.hpp"
#include "gclab/oracles.hpp"

namespace gclab {

/// One-round Even-Mansour over a group: E_k(m) = P(m*k)*k with a public
/// random permutation P and a single key k.
struct EmKey {
  Element key;
};

Element em_encrypt(LazyPermutation& perm, const EmKey& k, const Element& m);
Element em_decrypt(LazyPermutation& perm, const EmKey& k, const Element& c);

/// Iterated variant: r independent permutations and r keys, applied as
/// x_i = P_i(x_{i-1} * k_i) * k_i.  perms[i] must outlive the struct.
struct EmMultiKey {
  std::vector<Element> keys;
  std::vector<LazyPermutation*> perms;
};

Element em_multi_encrypt(const EmMultiKey& k, const Element& m);
Element em_multi_decrypt(const EmMultiKey& k, const Element& c);

}  // namespace gclab
