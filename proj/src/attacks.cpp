#include "gclab/attacks.hpp"

#include <cmath>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gclab/even_mansour.hpp"
#include "gclab/feistel.hpp"
#include "gclab/oracles.hpp"
#include "gclab/shuffles.hpp"

namespace gclab {

namespace {

void require_square_product(const GroupRef& g, const char* who) {
  if (!g) throw std::invalid_argument(std::string(who) + ": null group");
  if (g->kind() != GroupKind::Product || !g->left()->same(*g->right()))
    throw std::invalid_argument(std::string(who) +
                                ": domain must be a square product group");
}

Element sample_distinct(const GroupRef& g, const Element& avoid,
                        RandomStream& rng) {
  if (g->order() < 2)
    throw std::invalid_argument(
        "sample_distinct: group must have at least two elements");
  Element e = g->sample(rng);
  while (e == avoid) e = g->sample(rng);
  return e;
}

}  // namespace

void OracleBundle::add_pool(const std::string& pool, std::uint64_t budget) {
  if (!pools_.emplace(pool, Pool{budget, 0}).second)
    throw std::invalid_argument("duplicate budget pool '" + pool + "'");
}

void OracleBundle::add(const std::string& name, const std::string& pool,
                       GroupRef domain, OracleFn fn) {
  if (pools_.find(pool) == pools_.end())
    throw std::invalid_argument("oracle '" + name +
                                "' names undeclared pool '" + pool + "'");
  if (!domain)
    throw std::invalid_argument("oracle '" + name + "' needs a domain");
  if (!fn)
    throw std::invalid_argument("oracle '" + name + "' needs a callable");
  Entry entry{pool, std::move(domain), std::move(fn), 0};
  if (!oracles_.emplace(name, std::move(entry)).second)
    throw std::invalid_argument("duplicate oracle '" + name + "'");
}

bool OracleBundle::has(const std::string& name) const {
  return oracles_.find(name) != oracles_.end();
}

const GroupRef& OracleBundle::domain(const std::string& name) const {
  auto it = oracles_.find(name);
  if (it == oracles_.end())
    throw std::out_of_range("no oracle named '" + name + "'");
  return it->second.domain;
}

std::optional<Element> OracleBundle::query_opt(const std::string& name,
                                               const Element& x) {
  auto it = oracles_.find(name);
  if (it == oracles_.end())
    throw std::out_of_range("no oracle named '" + name + "'");
  Entry& entry = it->second;
  entry.domain->require_member(x, name.c_str());
  Pool& pool = pools_.at(entry.pool);
  if (pool.budget != kUnlimited && pool.used >= pool.budget)
    throw QueryBudgetError(name);
  ++pool.used;
  ++entry.count;
  return entry.fn(x);
}

Element OracleBundle::query(const std::string& name, const Element& x) {
  std::optional<Element> answer = query_opt(name, x);
  if (!answer)
    throw std::logic_error("oracle '" + name + "' refused a query() call");
  return *answer;
}

std::uint64_t OracleBundle::count(const std::string& name) const {
  auto it = oracles_.find(name);
  if (it == oracles_.end())
    throw std::out_of_range("no oracle named '" + name + "'");
  return it->second.count;
}

std::uint64_t OracleBundle::pool_used(const std::string& pool) const {
  auto it = pools_.find(pool);
  if (it == pools_.end())
    throw std::out_of_range("no budget pool named '" + pool + "'");
  return it->second.used;
}

std::uint64_t OracleBundle::pool_budget(const std::string& pool) const {
  auto it = pools_.find(pool);
  if (it == pools_.end())
    throw std::out_of_range("no budget pool named '" + pool + "'");
  return it->second.budget;
}

double hoeffding_halfwidth(std::uint64_t trials, double alpha) {
  if (trials == 0)
    throw std::invalid_argument("hoeffding_halfwidth: trials must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("hoeffding_halfwidth: alpha must be in (0,1)");
  return std::sqrt(std::log(2.0 / alpha) /
                   (2.0 * static_cast<double>(trials)));
}

AdvantageEstimate run_distinguisher_game(const WorldFactory& real_world,
                                         const WorldFactory& ideal_world,
                                         const Distinguisher& distinguisher,
                                         std::uint64_t trials,
                                         RandomStream& rng) {
  if (trials == 0)
    throw std::invalid_argument(
        "run_distinguisher_game: trials must be >= 1");
  auto acceptance = [&](const WorldFactory& factory, const char* tag) {
    std::uint64_t accepts = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const std::string base = std::string(tag) + "/" + std::to_string(t);
      RandomStream world_rng = rng.fork(base + "/world");
      RandomStream adv_rng = rng.fork(base + "/adv");
      OracleBundle world = factory(world_rng);
      if (distinguisher(world, adv_rng)) ++accepts;
    }
    return static_cast<double>(accepts) / static_cast<double>(trials);
  };
  AdvantageEstimate est;
  est.trials = trials;
  est.p_real = acceptance(real_world, "real");
  est.p_ideal = acceptance(ideal_world, "ideal");
  est.advantage = std::fabs(est.p_real - est.p_ideal);
  est.ci_halfwidth = hoeffding_halfwidth(trials);
  return est;
}

namespace {

std::optional<Element> slide_search(const GroupRef& g, const PointFn& enc,
                                    const PointFn& perm, std::uint64_t d,
                                    RandomStream& rng, bool cross_index) {
  if (!g) throw std::invalid_argument("slide_attack: null group");
  if (d == 0) throw std::invalid_argument("slide_attack: d must be >= 1");
  const std::size_t n = static_cast<std::size_t>(d);
  std::vector<Element> xs, ex, ys, py;
  xs.reserve(n);
  ex.reserve(n);
  ys.reserve(n);
  py.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(g->sample(rng));
    ex.push_back(enc(xs.back()));
  }
  for (std::size_t j = 0; j < n; ++j) {
    ys.push_back(g->sample(rng));
    py.push_back(perm(ys.back()));
  }

  // One fresh point, drawn lazily, shared by all candidate verifications.
  std::optional<Element> probe;
  std::optional<Element> probe_ct;
  auto verified = [&](std::size_t i, std::size_t j) -> std::optional<Element> {
    if (!(g->op(ex[i], g->inv(ys[j])) == g->op(py[j], g->inv(xs[i]))))
      return std::nullopt;
    Element cand = g->op(g->inv(xs[i]), ys[j]);
    if (!probe) {
      probe = g->sample(rng);
      probe_ct = enc(*probe);
    }
    if (g->op(perm(g->op(*probe, cand)), cand) == *probe_ct) return cand;
    return std::nullopt;
  };

  if (!cross_index) {
    for (std::size_t i = 0; i < n; ++i)
      if (auto key = verified(i, i)) return key;
    return std::nullopt;
  }
  if (g->abelian()) {
    // E(x)*x = P(y)*y splits by query index, so matches fall out of a hash
    // join instead of the quadratic scan.
    std::unordered_multimap<std::uint64_t, std::size_t> stat;
    stat.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      stat.emplace(g->op_index(ex[i].index, xs[i].index), i);
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint64_t want = g->op_index(py[j].index, ys[j].index);
      auto range = stat.equal_range(want);
      for (auto it = range.first; it != range.second; ++it)
        if (auto key = verified(it->second, j)) return key;
    }
    return std::nullopt;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (auto key = verified(i, j)) return key;
  return std::nullopt;
}

}  // namespace

std::optional<Element> slide_attack(const GroupRef& g, const PointFn& enc,
                                    const PointFn& perm, std::uint64_t d,
                                    RandomStream& rng) {
  return slide_search(g, enc, perm, d, rng, true);
}

std::optional<Element> slide_attack_same_index(const GroupRef& g,
                                               const PointFn& enc,
                                               const PointFn& perm,
                                               std::uint64_t d,
                                               RandomStream& rng) {
  return slide_search(g, enc, perm, d, rng, false);
}

bool feistel1_distinguisher(OracleBundle& world, RandomStream& rng) {
  const GroupRef dom = world.domain(oracle_names::kForward);
  Element in = dom->sample(rng);
  FeistelState s = state_from_element(in);
  FeistelState out =
      state_from_element(world.query(oracle_names::kForward, in));
  return out.left == s.right;
}

bool feistel2_distinguisher(OracleBundle& world, RandomStream& rng) {
  const GroupRef dom = world.domain(oracle_names::kForward);
  require_square_product(dom, "feistel2_distinguisher");
  const GroupRef half = dom->left();
  Element shared_right = half->sample(rng);
  Element l0p = sample_distinct(half, half->identity(), rng);
  Element a1 = world.query(oracle_names::kForward,
                           dom->compose_pair(half->identity(), shared_right));
  Element a2 = world.query(oracle_names::kForward,
                           dom->compose_pair(l0p, shared_right));
  FeistelState s1 = state_from_element(a1);
  FeistelState s2 = state_from_element(a2);
  return half->op(s2.left, half->inv(s1.left)) == l0p;
}

bool feistel3_sprp_attack(OracleBundle& world, RandomStream& rng) {
  const GroupRef dom = world.domain(oracle_names::kForward);
  require_square_product(dom, "feistel3_sprp_attack");
  const GroupRef half = dom->left();
  Element l0 = half->sample(rng);
  Element l0p = sample_distinct(half, l0, rng);
  Element r0 = half->sample(rng);
  FeistelState c1 = state_from_element(
      world.query(oracle_names::kForward, dom->compose_pair(l0, r0)));
  FeistelState c2 = state_from_element(
      world.query(oracle_names::kForward, dom->compose_pair(l0p, r0)));
  Element probe_right = half->op(half->op(l0, half->inv(l0p)), c2.right);
  FeistelState back = state_from_element(world.query(
      oracle_names::kBackward, dom->compose_pair(c2.left, probe_right)));
  Element want = half->op(half->op(c2.left, half->inv(c1.left)), r0);
  return back.right == want;
}

bool sc_translation_distinguisher(OracleBundle& world, RandomStream& rng) {
  const GroupRef dom = world.domain(oracle_names::kForward);
  Element m1 = dom->sample(rng);
  Element m2 = sample_distinct(dom, m1, rng);
  Element c1 = world.query(oracle_names::kForward, m1);
  Element c2 = world.query(oracle_names::kForward, m2);
  return dom->op(c1, dom->inv(m1)) == dom->op(c2, dom->inv(m2));
}

Distinguisher make_slide_distinguisher(std::uint64_t d, bool same_index) {
  if (d == 0)
    throw std::invalid_argument("make_slide_distinguisher: d must be >= 1");
  return [d, same_index](OracleBundle& world, RandomStream& rng) -> bool {
    const GroupRef g = world.domain(oracle_names::kForward);
    PointFn enc = [&world](const Element& x) {
      return world.query(oracle_names::kForward, x);
    };
    PointFn perm = [&world](const Element& x) {
      return world.query(oracle_names::kPerm, x);
    };
    try {
      auto key = same_index ? slide_attack_same_index(g, enc, perm, d, rng)
                            : slide_attack(g, enc, perm, d, rng);
      return key.has_value();
    } catch (const QueryBudgetError&) {
      return false;  // out of queries without a verified key
    }
  };
}

bool coin_distinguisher(OracleBundle& world, RandomStream& rng) {
  (void)world;
  return rng.next_bit();
}

bool run_efp_game(const GroupRef& g, std::uint64_t cipher_budget,
                  std::uint64_t perm_budget, const EfpAdversary& adversary,
                  RandomStream& rng) {
  if (!g) throw std::invalid_argument("run_efp_game: null group");
  auto perm = std::make_shared<LazyPermutation>(g, rng.fork("perm"));
  RandomStream key_rng = rng.fork("key");
  const EmKey k{g->sample(key_rng)};
  auto seen =
      std::make_shared<std::set<std::pair<std::uint64_t, std::uint64_t>>>();

  OracleBundle world;
  world.add_pool(pool_names::kCipher, cipher_budget);
  world.add_pool(pool_names::kPerm, perm_budget);
  world.add(oracle_names::kForward, pool_names::kCipher, g,
            [perm, k, seen](const Element& m) -> std::optional<Element> {
              Element c = em_encrypt(*perm, k, m);
              seen->emplace(m.index, c.index);
              return c;
            });
  world.add(oracle_names::kBackward, pool_names::kCipher, g,
            [perm, k, seen](const Element& c) -> std::optional<Element> {
              Element m = em_decrypt(*perm, k, c);
              seen->emplace(m.index, c.index);
              return m;
            });
  world.add(oracle_names::kPerm, pool_names::kPerm, g,
            [perm](const Element& x) -> std::optional<Element> {
              return perm->eval(x);
            });
  world.add(oracle_names::kPermInv, pool_names::kPerm, g,
            [perm](const Element& y) -> std::optional<Element> {
              return perm->inv_eval(y);
            });

  RandomStream adv_rng = rng.fork("adv");
  ForgeryClaim claim = adversary(g, world, adv_rng);
  g->require_member(claim.message, "forgery message");
  g->require_member(claim.ciphertext, "forgery ciphertext");
  if (seen->count({claim.message.index, claim.ciphertext.index}) != 0)
    return false;
  return em_encrypt(*perm, k, claim.message) == claim.ciphertext;
}

bool run_cp_game(const GroupRef& g, std::uint64_t cipher_budget,
                 std::uint64_t perm_budget, const CpAdversary& adversary,
                 RandomStream& rng) {
  if (!g) throw std::invalid_argument("run_cp_game: null group");
  auto perm = std::make_shared<LazyPermutation>(g, rng.fork("perm"));
  RandomStream key_rng = rng.fork("key");
  const EmKey k{g->sample(key_rng)};
  RandomStream challenge_rng = rng.fork("challenge");
  const Element m0 = g->sample(challenge_rng);
  const Element c0 = em_encrypt(*perm, k, m0);

  OracleBundle world;
  world.add_pool(pool_names::kCipher, cipher_budget);
  world.add_pool(pool_names::kPerm, perm_budget);
  world.add(oracle_names::kForward, pool_names::kCipher, g,
            [perm, k](const Element& m) -> std::optional<Element> {
              return em_encrypt(*perm, k, m);
            });
  // The decryption oracle refuses exactly the challenge ciphertext.
  world.add(oracle_names::kBackward, pool_names::kCipher, g,
            [perm, k, c0](const Element& c) -> std::optional<Element> {
              if (c == c0) return std::nullopt;
              return em_decrypt(*perm, k, c);
            });
  world.add(oracle_names::kPerm, pool_names::kPerm, g,
            [perm](const Element& x) -> std::optional<Element> {
              return perm->eval(x);
            });
  world.add(oracle_names::kPermInv, pool_names::kPerm, g,
            [perm](const Element& y) -> std::optional<Element> {
              return perm->inv_eval(y);
            });

  RandomStream adv_rng = rng.fork("adv");
  Element answer = adversary(g, c0, world, adv_rng);
  g->require_member(answer, "challenge answer");
  return answer == m0;
}

WorldFactory make_ideal_world(GroupRef domain, WorldOptions opt) {
  if (!domain) throw std::invalid_argument("make_ideal_world: null group");
  if (opt.round_fns) require_square_product(domain, "make_ideal_world");
  return [domain, opt](RandomStream& rng) {
    auto pi = std::make_shared<LazyPermutation>(domain, rng.fork("ideal"));
    OracleBundle world;
    world.add_pool(pool_names::kCipher, opt.cipher_budget);
    world.add(oracle_names::kForward, pool_names::kCipher, domain,
              [pi](const Element& x) -> std::optional<Element> {
                return pi->eval(x);
              });
    if (opt.backward)
      world.add(oracle_names::kBackward, pool_names::kCipher, domain,
                [pi](const Element& y) -> std::optional<Element> {
                  return pi->inv_eval(y);
                });
    if (opt.public_perm) {
      auto pub = std::make_shared<LazyPermutation>(domain, rng.fork("public"));
      world.add_pool(pool_names::kPerm, opt.perm_budget);
      world.add(oracle_names::kPerm, pool_names::kPerm, domain,
                [pub](const Element& x) -> std::optional<Element> {
                  return pub->eval(x);
                });
      world.add(oracle_names::kPermInv, pool_names::kPerm, domain,
                [pub](const Element& y) -> std::optional<Element> {
                  return pub->inv_eval(y);
                });
    }
    if (opt.round_fns) {
      const GroupRef half = domain->left();
      auto f = std::make_shared<LazyFunction>(half, half, rng.fork("f"));
      auto gfn = std::make_shared<LazyFunction>(half, half, rng.fork("g"));
      world.add_pool(pool_names::kF, opt.f_budget);
      world.add_pool(pool_names::kG, opt.g_budget);
      world.add(oracle_names::kF, pool_names::kF, half,
                [f](const Element& x) -> std::optional<Element> {
                  return f->eval(x);
                });
      world.add(oracle_names::kG, pool_names::kG, half,
                [gfn](const Element& x) -> std::optional<Element> {
                  return gfn->eval(x);
                });
    }
    return world;
  };
}

WorldFactory make_em_world(GroupRef g, WorldOptions opt) {
  if (!g) throw std::invalid_argument("make_em_world: null group");
  if (opt.round_fns)
    throw std::invalid_argument(
        "make_em_world: the one-key construction has no round functions");
  return [g, opt](RandomStream& rng) {
    auto perm = std::make_shared<LazyPermutation>(g, rng.fork("perm"));
    RandomStream key_rng = rng.fork("key");
    const EmKey k{g->sample(key_rng)};
    OracleBundle world;
    world.add_pool(pool_names::kCipher, opt.cipher_budget);
    world.add(oracle_names::kForward, pool_names::kCipher, g,
              [perm, k](const Element& m) -> std::optional<Element> {
                return em_encrypt(*perm, k, m);
              });
    if (opt.backward)
      world.add(oracle_names::kBackward, pool_names::kCipher, g,
                [perm, k](const Element& c) -> std::optional<Element> {
                  return em_decrypt(*perm, k, c);
                });
    if (opt.public_perm) {
      world.add_pool(pool_names::kPerm, opt.perm_budget);
      world.add(oracle_names::kPerm, pool_names::kPerm, g,
                [perm](const Element& x) -> std::optional<Element> {
                  return perm->eval(x);
                });
      world.add(oracle_names::kPermInv, pool_names::kPerm, g,
                [perm](const Element& y) -> std::optional<Element> {
                  return perm->inv_eval(y);
                });
    }
    return world;
  };
}

WorldFactory make_feistel_world(GroupRef pair_group, std::uint64_t rounds,
                                WorldOptions opt) {
  require_square_product(pair_group, "make_feistel_world");
  if (opt.round_fns || opt.public_perm)
    throw std::invalid_argument(
        "make_feistel_world: round functions stay hidden and there is no "
        "public permutation");
  return [pair_group, rounds, opt](RandomStream& rng) {
    const GroupRef half = pair_group->left();
    auto spec = std::make_shared<FeistelSpec>();
    spec->rounds.reserve(rounds);
    for (std::uint64_t i = 0; i < rounds; ++i)
      spec->rounds.push_back(
          lazy_round_fn(half, rng.fork("round/" + std::to_string(i))));
    OracleBundle world;
    world.add_pool(pool_names::kCipher, opt.cipher_budget);
    world.add(oracle_names::kForward, pool_names::kCipher, pair_group,
              [pair_group, spec](const Element& x) -> std::optional<Element> {
                return state_to_element(
                    *pair_group, feistel_encrypt(*spec, state_from_element(x)));
              });
    if (opt.backward)
      world.add(oracle_names::kBackward, pool_names::kCipher, pair_group,
                [pair_group, spec](const Element& y) -> std::optional<Element> {
                  return state_to_element(
                      *pair_group,
                      feistel_decrypt(*spec, state_from_element(y)));
                });
    return world;
  };
}

WorldFactory make_psi_world(GroupRef pair_group, WorldOptions opt) {
  require_square_product(pair_group, "make_psi_world");
  if (opt.public_perm)
    throw std::invalid_argument("make_psi_world: no public permutation");
  return [pair_group, opt](RandomStream& rng) {
    const GroupRef half = pair_group->left();
    auto f = std::make_shared<LazyFunction>(half, half, rng.fork("f"));
    auto gfn = std::make_shared<LazyFunction>(half, half, rng.fork("g"));
    RandomStream kl = rng.fork("key/left");
    RandomStream kr = rng.fork("key/right");
    const PsiKey key{half->sample(kl), half->sample(kr)};
    OracleBundle world;
    world.add_pool(pool_names::kCipher, opt.cipher_budget);
    world.add(oracle_names::kForward, pool_names::kCipher, pair_group,
              [pair_group, f, gfn, key](const Element& x)
                  -> std::optional<Element> {
                return state_to_element(
                    *pair_group,
                    psi_encrypt(*f, *gfn, key, state_from_element(x)));
              });
    if (opt.backward)
      world.add(oracle_names::kBackward, pool_names::kCipher, pair_group,
                [pair_group, f, gfn, key](const Element& y)
                    -> std::optional<Element> {
                  return state_to_element(
                      *pair_group,
                      psi_decrypt(*f, *gfn, key, state_from_element(y)));
                });
    if (opt.round_fns) {
      world.add_pool(pool_names::kF, opt.f_budget);
      world.add_pool(pool_names::kG, opt.g_budget);
      world.add(oracle_names::kF, pool_names::kF, half,
                [f](const Element& x) -> std::optional<Element> {
                  return f->eval(x);
                });
      world.add(oracle_names::kG, pool_names::kG, half,
                [gfn](const Element& x) -> std::optional<Element> {
                  return gfn->eval(x);
                });
    }
    return world;
  };
}

WorldFactory make_sc_world(GroupRef g, std::uint64_t rounds,
                           WorldOptions opt) {
  if (!g) throw std::invalid_argument("make_sc_world: null group");
  if (opt.round_fns || opt.public_perm)
    throw std::invalid_argument(
        "make_sc_world: the shuffle exposes no auxiliary oracles");
  return [g, rounds, opt](RandomStream& rng) {
    RandomStream param_rng = rng.fork("shuffle");
    const ShuffleParams params = random_shuffle_params(g, rounds, param_rng);
    OracleBundle world;
    world.add_pool(pool_names::kCipher, opt.cipher_budget);
    world.add(oracle_names::kForward, pool_names::kCipher, g,
              [params](const Element& x) -> std::optional<Element> {
                return sc_shuffle(params, x);
              });
    if (opt.backward)
      world.add(oracle_names::kBackward, pool_names::kCipher, g,
                [params](const Element& y) -> std::optional<Element> {
                  return sc_inverse(params, y);
                });
    return world;
  };
}

}  // namespace gclab
