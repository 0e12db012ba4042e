#include "gclab/even_mansour.hpp"

#include <stdexcept>

namespace gclab {

namespace {

void check_multi(const EmMultiKey& k) {
  if (k.keys.empty() || k.keys.size() != k.perms.size())
    throw std::invalid_argument(
        "em_multi: need r >= 1 keys and exactly one permutation per key");
  const Group& g = *k.keys.front().group;
  for (const Element& e : k.keys) g.require_member(e, "em_multi");
  for (LazyPermutation* p : k.perms) {
    if (p == nullptr) throw std::invalid_argument("em_multi: null permutation");
    if (!p->group().same(g))
      throw std::invalid_argument("em_multi: permutation group mismatch (" +
                                  p->group().name() + " vs " + g.name() + ")");
  }
}

}  // namespace

Element em_encrypt(LazyPermutation& perm, const EmKey& k, const Element& m) {
  const Group& g = perm.group();
  g.require_member(k.key, "em_encrypt");
  g.require_member(m, "em_encrypt");
  return g.op(perm.eval(g.op(m, k.key)), k.key);
}

Element em_decrypt(LazyPermutation& perm, const EmKey& k, const Element& c) {
  const Group& g = perm.group();
  g.require_member(k.key, "em_decrypt");
  g.require_member(c, "em_decrypt");
  const Element kinv = g.inv(k.key);
  return g.op(perm.inv_eval(g.op(c, kinv)), kinv);
}

Element em_multi_encrypt(const EmMultiKey& k, const Element& m) {
  check_multi(k);
  Element x = m;
  for (std::size_t i = 0; i < k.keys.size(); ++i)
    x = em_encrypt(*k.perms[i], EmKey{k.keys[i]}, x);
  return x;
}

Element em_multi_decrypt(const EmMultiKey& k, const Element& c) {
  check_multi(k);
  Element x = c;
  for (std::size_t i = k.keys.size(); i-- > 0;)
    x = em_decrypt(*k.perms[i], EmKey{k.keys[i]}, x);
  return x;
}

}  // namespace gclab
