#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gclab/feistel.hpp"
#include "gclab/group.hpp"
#include "gclab/oracles.hpp"
#include "gclab/rng.hpp"

namespace gclab {

using Rational = boost::multiprecision::cpp_rational;

/// Four idealizations of a whitened lazy permutation, all answering the
/// same E/D/P/Pinv interface.  R answers uniformly and only watches for
/// key collisions between the two query records; X repairs collisions so
/// the cipher and permutation views stay consistent; XPrime routes cipher
/// queries through a shared lazily defined permutation table; RPrime plays
/// like R but defers the key draw until after the last query.
enum class GameKind { R, X, XPrime, RPrime };

enum class QueryKind { Enc, Dec, PermFwd, PermInv };

struct GameQuery {
  QueryKind kind;
  Element value;
};

/// Ordered query-answer records: cipher pairs (m, c) and permutation pairs
/// (x, y).  No value ever repeats within a column, so each of the four
/// coordinate sets doubles as a partial-function table.
class TranscriptSets {
 public:
  /// Both throw std::logic_error when a coordinate would repeat.
  void add_cipher_pair(const Element& m, const Element& c);
  void add_perm_pair(const Element& x, const Element& y);

  const std::vector<std::pair<Element, Element>>& cipher_pairs() const {
    return cipher_;
  }
  const std::vector<std::pair<Element, Element>>& perm_pairs() const {
    return perm_;
  }
  std::size_t cipher_count() const { return cipher_.size(); }
  std::size_t perm_count() const { return perm_.size(); }

  bool has_plain(const Element& m) const;
  bool has_cipher(const Element& c) const;
  bool has_perm_input(const Element& x) const;
  bool has_perm_output(const Element& y) const;

  std::optional<Element> cipher_of(const Element& m) const;
  std::optional<Element> plain_of(const Element& c) const;
  std::optional<Element> output_of(const Element& x) const;
  std::optional<Element> input_of(const Element& y) const;

 private:
  std::vector<std::pair<Element, Element>> cipher_;
  std::vector<std::pair<Element, Element>> perm_;
};

/// True when the key collides the records: some recorded plaintext shifted
/// by the key hits a recorded permutation input, or some ciphertext
/// unshifted by it hits a recorded permutation output.
bool is_bad_key(const Element& k, const TranscriptSets& tr);

/// Number of colliding keys, found by trying the whole group.
std::uint64_t bad_key_count(const GroupRef& group, const TranscriptSets& tr);

/// One playable game instance.  The caller supplies the randomness for
/// every step; the state keeps the visible transcript, the key (absent in
/// RPrime until finalize) and the one-way flag.
class GameState {
 public:
  GameState(GameKind which, GroupRef group, RandomStream& rng);

  /// Answers one fresh query by the selected game's rules.  Throws
  /// std::logic_error on a repeated query or a finalized game.
  Element step(const GameQuery& q, RandomStream& rng);

  /// RPrime only: draws the key now and evaluates the flag against the
  /// finished transcript.  The game accepts no further steps.
  void finalize(RandomStream& rng);

  GameKind which_game() const { return which_; }
  const GroupRef& group() const { return group_; }
  const TranscriptSets& transcripts() const { return visible_; }
  const std::optional<Element>& key() const { return key_; }
  bool flag_bad() const { return flag_bad_; }
  /// Candidate answers rejected during the most recent step; only X's
  /// redraw loop can make this nonzero.
  std::uint64_t last_retries() const { return last_retries_; }

 private:
  Element step_uniform(const GameQuery& q, RandomStream& rng);
  Element step_repair(const GameQuery& q, RandomStream& rng);
  Element step_table(const GameQuery& q, RandomStream& rng);
  void check_fresh(const GameQuery& q) const;
  void record(const GameQuery& q, const Element& answer);

  GameKind which_;
  GroupRef group_;
  std::optional<Element> key_;
  TranscriptSets visible_;
  // XPrime's backing permutation table; cipher queries extend it too, so
  // it can be strictly larger than the visible permutation record.
  std::map<std::uint64_t, std::uint64_t> table_fwd_;
  std::map<std::uint64_t, std::uint64_t> table_bwd_;
  bool flag_bad_ = false;
  bool finalized_ = false;
  std::uint64_t last_retries_ = 0;
};

/// Deterministic query plan for the exact checks: given the answers seen
/// so far, yields the next query, or nothing when done.  Plans never
/// repeat any part of an earlier query.
struct ScriptedAdversary {
  std::string name;
  std::function<std::optional<GameQuery>(const GroupRef&,
                                         const std::vector<Element>&)>
      next;
};

/// Fixed two-query plans covering every oracle pairing, several of them
/// feeding the first answer into the second query.
std::vector<ScriptedAdversary> script_catalog();

/// Law of the visible answer sequence (canonical indices in query order)
/// with every random draw enumerated exactly.
using TranscriptDist = std::map<std::vector<std::uint64_t>, Rational>;

constexpr std::uint64_t kExactGameOrderCap = 5;

/// Throws std::length_error above the cap.  X's redraw loop enters as a
/// single draw from the renormalized conditional law, which matches the
/// loop exactly.
TranscriptDist transcript_distribution(GameKind which,
                                       const ScriptedAdversary& adv,
                                       const GroupRef& group);

/// Exact flag probability for the same enumeration.  XPrime keeps no flag
/// and is rejected with std::invalid_argument.
Rational bad_probability(GameKind which, const ScriptedAdversary& adv,
                         const GroupRef& group);

/// Which side the adversary supplied in a cipher interaction.
enum class PsiDir { Forward, Backward };

/// One cipher interaction: the pair (x, y) with y the image of x, plus the
/// queried side.
struct PsiCipherPair {
  PsiDir dir;
  FeistelState x;
  FeistelState y;
};

/// Four-oracle interaction record for the two-function four-round cipher:
/// cipher pairs over G x G plus direct first/last- and middle-round
/// function tables over G.
struct PsiTranscript {
  GroupRef half;
  std::vector<PsiCipherPair> cipher;
  std::vector<std::pair<Element, Element>> f_pairs;
  std::vector<std::pair<Element, Element>> g_pairs;
};

/// No column repeats anywhere: cipher inputs, cipher outputs, f inputs and
/// g inputs are each pairwise distinct.
bool consistent_transcript(const PsiTranscript& sigma);

/// Uniformly random consistent transcript with the given query counts;
/// cipher directions alternate starting forward.
PsiTranscript random_psi_transcript(const GroupRef& half, std::size_t q_c,
                                    std::size_t q_f, std::size_t q_g,
                                    RandomStream& rng);

/// Middle-round inputs forced on f by a transcript under a fixed key and
/// outer-round function: round2[i] is what cipher pair i feeds the second
/// round, round3[i] the third.
struct PsiMiddleInputs {
  std::vector<Element> round2;
  std::vector<Element> round3;
};

PsiMiddleInputs psi_middle_inputs(const PsiTranscript& sigma, const PsiKey& k,
                                  LazyFunction& g);

/// True when an outer-round input (first round from the plaintext side,
/// last round from the ciphertext side) coincides with a direct g-query.
bool badg_detect(const PsiTranscript& sigma, const PsiKey& k);

/// True when the forced middle-round inputs collide among themselves or
/// with a direct f-query.
bool bad_detect(const PsiTranscript& sigma, const PsiKey& k, LazyFunction& g);

/// Constructive converse of the collision analysis: builds the f-table the
/// transcript forces under (k, g) and replays every cipher pair through
/// the four rounds.  True when no forced definition clashes and every
/// replay reproduces its recorded answer; guaranteed whenever bad_detect
/// says false.
bool psi_explains_transcript(const PsiTranscript& sigma, const PsiKey& k,
                             LazyFunction& g);

/// Stateful uniform cipher with replay: a repeated forward input returns
/// the old output, a repeated backward output the old input, anything else
/// a fresh uniform pair.  Drawn-side collisions break the record's
/// functional reading and are tracked, never repaired.
class RTildeOracle {
 public:
  explicit RTildeOracle(GroupRef half);

  FeistelState query(PsiDir dir, const FeistelState& v, RandomStream& rng);

  const std::vector<PsiCipherPair>& transcript() const { return pairs_; }
  bool inconsistent() const { return inconsistent_; }

 private:
  GroupRef half_;
  std::vector<PsiCipherPair> pairs_;
  bool inconsistent_ = false;
};

/// Advantage bounds for the four-round two-function cipher against q_c
/// cipher, q_f middle-round and q_g outer-round queries: the constant as
/// stated and the slightly larger one the accumulation actually yields.
/// Callers report both.
Rational psi_bound_stated(std::uint64_t q_c, std::uint64_t q_f,
                          std::uint64_t q_g, std::uint64_t order);
Rational psi_bound_accumulated(std::uint64_t q_c, std::uint64_t q_f,
                               std::uint64_t q_g, std::uint64_t order);
/// Same bound rephrased for a total budget q of queries of any type.
Rational psi_bound_total(std::uint64_t q, std::uint64_t order);

/// Advantage bound for the single-round whitened cipher with s cipher and
/// t permutation queries: 2st/|G|.
Rational em_sprp_bound(std::uint64_t s, std::uint64_t t, std::uint64_t order);

/// One checked statement, ready for JSON reporting.
struct LemmaReport {
  std::string lemma;
  std::string instance;
  std::string lhs;
  std::string rhs;
  std::string bound;
  bool verdict = false;
};

std::string to_json(const LemmaReport& r);

}  // namespace gclab
