#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "gclab/group.hpp"
#include "gclab/rng.hpp"

namespace gclab {

/// Raised when a query would push an oracle's budget pool past its cap.
class QueryBudgetError : public std::runtime_error {
 public:
  explicit QueryBudgetError(const std::string& oracle_name)
      : std::runtime_error("query budget exhausted at oracle '" + oracle_name +
                           "'"),
        oracle_(oracle_name) {}
  const std::string& oracle() const { return oracle_; }

 private:
  std::string oracle_;
};

/// Conventional oracle names used by the world builders below.
namespace oracle_names {
inline constexpr const char* kForward = "fwd";
inline constexpr const char* kBackward = "bwd";
inline constexpr const char* kPerm = "P";
inline constexpr const char* kPermInv = "Pinv";
inline constexpr const char* kF = "f";
inline constexpr const char* kG = "g";
}  // namespace oracle_names

/// Conventional budget pool names.  fwd/bwd share the cipher pool, P/Pinv
/// the perm pool; the round-function oracles get pools of their own.
namespace pool_names {
inline constexpr const char* kCipher = "cipher";
inline constexpr const char* kPerm = "perm";
inline constexpr const char* kF = "f";
inline constexpr const char* kG = "g";
}  // namespace pool_names

/// Named oracles with per-oracle call counters and shared budget pools.
/// An oracle may answer std::nullopt to model a refusal; refused queries
/// still consume budget.  Pools must be declared before oracles join them,
/// so a typo cannot silently lift a cap.
class OracleBundle {
 public:
  using OracleFn = std::function<std::optional<Element>(const Element&)>;
  static constexpr std::uint64_t kUnlimited = ~std::uint64_t{0};

  void add_pool(const std::string& pool, std::uint64_t budget);
  void add(const std::string& name, const std::string& pool, GroupRef domain,
           OracleFn fn);

  bool has(const std::string& name) const;
  const GroupRef& domain(const std::string& name) const;

  /// Query an oracle that never refuses; a refusal is a contract violation.
  Element query(const std::string& name, const Element& x);
  /// Query an oracle that may refuse; std::nullopt is the refusal sentinel.
  std::optional<Element> query_opt(const std::string& name, const Element& x);

  std::uint64_t count(const std::string& name) const;
  std::uint64_t pool_used(const std::string& pool) const;
  std::uint64_t pool_budget(const std::string& pool) const;

 private:
  struct Pool {
    std::uint64_t budget = kUnlimited;
    std::uint64_t used = 0;
  };
  struct Entry {
    std::string pool;
    GroupRef domain;
    OracleFn fn;
    std::uint64_t count = 0;
  };
  std::map<std::string, Pool> pools_;
  std::map<std::string, Entry> oracles_;
};

/// Acceptance rates of one distinguisher in two worlds, with a two-sided
/// Hoeffding confidence halfwidth for each rate.
struct AdvantageEstimate {
  double p_real = 0.0;
  double p_ideal = 0.0;
  double advantage = 0.0;
  std::uint64_t trials = 0;
  double ci_halfwidth = 0.0;
};

/// Halfwidth of a two-sided level-(1-alpha) Hoeffding interval for a mean
/// of `trials` Bernoulli draws: sqrt(ln(2/alpha) / (2 * trials)).
double hoeffding_halfwidth(std::uint64_t trials, double alpha = 0.05);

/// Builds a fresh world (keys, oracles) from a trial-local stream.
using WorldFactory = std::function<OracleBundle(RandomStream&)>;
/// Queries the world and outputs 1 for "this is the real construction".
using Distinguisher = std::function<bool(OracleBundle&, RandomStream&)>;

/// Runs `trials` independent trials in each world with fresh oracles, keys
/// and adversary randomness per trial, and reports both acceptance rates.
/// Both worlds get equal trial counts; the advantage estimand matches the
/// hidden-coin game.
AdvantageEstimate run_distinguisher_game(const WorldFactory& real_world,
                                         const WorldFactory& ideal_world,
                                         const Distinguisher& distinguisher,
                                         std::uint64_t trials,
                                         RandomStream& rng);

/// Plain point oracle used by the key-recovery attacks.
using PointFn = std::function<Element(const Element&)>;

/// Slide-style key recovery against the one-key construction.  Queries d
/// uniform points to each oracle, matches the slid-pair statistic across
/// all (i, j) query pairs (hash join on E(x)*x = P(y)*y when the group is
/// abelian, pair scan on E(x_i)*y_j^-1 = P(y_j)*x_i^-1 otherwise), and
/// returns the first candidate x_i^-1 * y_j that reproduces the cipher on
/// a fresh verification point.  Returns nullopt when no candidate survives.
std::optional<Element> slide_attack(const GroupRef& g, const PointFn& enc,
                                    const PointFn& perm, std::uint64_t d,
                                    RandomStream& rng);

/// Variant that only matches equal query indices (i, i); it needs the j-th
/// perm query itself to be slid, so it succeeds at rate ~ d/|G| instead of
/// the birthday rate.
std::optional<Element> slide_attack_same_index(const GroupRef& g,
                                               const PointFn& enc,
                                               const PointFn& perm,
                                               std::uint64_t d,
                                               RandomStream& rng);

/// One-query test against a 1-round network on G x G: the output left half
/// always equals the input right half there, and matches a random
/// permutation's output only with probability 1/|G|.
bool feistel1_distinguisher(OracleBundle& world, RandomStream& rng);

/// Two-query test against a 2-round network: queries (1, g) and (L0', g)
/// share the right half, so the second output left half times the inverse
/// of the first recovers L0'.
bool feistel2_distinguisher(OracleBundle& world, RandomStream& rng);

/// Two encryptions plus one decryption against a 3-round network: queries
/// (L0, R0) and (L0', R0) with L0 != L0', then decrypts
/// (L3', L0 * L0'^-1 * R3') and accepts iff R0'' = L3' * L3^-1 * R0.
bool feistel3_sprp_attack(OracleBundle& world, RandomStream& rng);

/// Two-query test for left-translation structure: accepts iff
/// c1 * m1^-1 = c2 * m2^-1, which a round-key shuffle satisfies always and
/// a random permutation with probability 1/(|G|-1).
bool sc_translation_distinguisher(OracleBundle& world, RandomStream& rng);

/// Distinguisher wrapper: accept iff a budgeted slide key search returns a
/// verified key; budget exhaustion counts as a rejection.
Distinguisher make_slide_distinguisher(std::uint64_t d, bool same_index);

/// Oracle-ignoring coin flip; calibration baseline with zero advantage.
bool coin_distinguisher(OracleBundle& world, RandomStream& rng);

/// What a forger hands back: a claimed plaintext/ciphertext pair.
struct ForgeryClaim {
  Element message;
  Element ciphertext;
};

using EfpAdversary =
    std::function<ForgeryClaim(const GroupRef&, OracleBundle&, RandomStream&)>;

/// Forgery game against the one-key construction: fresh permutation and
/// key, oracles fwd/bwd (pool "cipher", budget s) and P/Pinv (pool "perm",
/// budget t).  Success iff the claim encrypts correctly and the pair never
/// appeared as a cipher-oracle query/answer pair.
bool run_efp_game(const GroupRef& g, std::uint64_t cipher_budget,
                  std::uint64_t perm_budget, const EfpAdversary& adversary,
                  RandomStream& rng);

using CpAdversary = std::function<Element(
    const GroupRef&, const Element& challenge, OracleBundle&, RandomStream&)>;

/// Challenge-inversion game: a uniform message is encrypted to c0, the
/// adversary sees c0 and the same oracles, except bwd refuses exactly c0.
/// Success iff the output equals the challenge's plaintext.
bool run_cp_game(const GroupRef& g, std::uint64_t cipher_budget,
                 std::uint64_t perm_budget, const CpAdversary& adversary,
                 RandomStream& rng);

/// Extra knobs for the standard world builders.
struct WorldOptions {
  bool backward = false;     // expose the inverse oracle
  bool public_perm = false;  // expose P / Pinv
  bool round_fns = false;    // expose the f / g oracles
  std::uint64_t cipher_budget = OracleBundle::kUnlimited;
  std::uint64_t perm_budget = OracleBundle::kUnlimited;
  std::uint64_t f_budget = OracleBundle::kUnlimited;
  std::uint64_t g_budget = OracleBundle::kUnlimited;
};

/// Ideal world: fwd/bwd is an independent uniform permutation of `domain`.
/// Any P/Pinv, f, g oracles requested are sampled independently of it; for
/// round_fns the domain must be a square product and f, g act on a factor.
WorldFactory make_ideal_world(GroupRef domain, WorldOptions opt = {});

/// One-key construction world: fwd/bwd is E_k/D_k over a fresh public
/// permutation, which P/Pinv expose when requested.
WorldFactory make_em_world(GroupRef g, WorldOptions opt = {});

/// r-round network on a square product group with independent hidden
/// round functions.
WorldFactory make_feistel_world(GroupRef pair_group, std::uint64_t rounds,
                                WorldOptions opt = {});

/// Four-round whitened network on a square product group; the f and g it
/// is built from are exposed as oracles when round_fns is set.
WorldFactory make_psi_world(GroupRef pair_group, WorldOptions opt = {});

/// Round-key shuffle world with fresh uniform parameters per trial.
WorldFactory make_sc_world(GroupRef g, std::uint64_t rounds,
                           WorldOptions opt = {});

}  // namespace gclab
