#include <doctest.h>

#include <stdexcept>

#include <json.hpp>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gclab/attacks.hpp"
#include "gclab/group.hpp"
#include "gclab/oracles.hpp"
#include "gclab/proof_games.hpp"
#include "gclab/rng.hpp"

using namespace gclab;

TEST_CASE("transcript records reject column repeats") {
  auto g = Group::zmod(12);
  TranscriptSets tr;
  tr.add_cipher_pair(g->element(0), g->element(5));
  CHECK(tr.has_plain(g->element(0)));
  CHECK(tr.has_cipher(g->element(5)));
  CHECK_FALSE(tr.has_plain(g->element(5)));
  CHECK(tr.cipher_of(g->element(0))->index == 5);
  CHECK(tr.plain_of(g->element(5))->index == 0);
  CHECK_FALSE(tr.cipher_of(g->element(1)).has_value());
  CHECK_THROWS_AS(tr.add_cipher_pair(g->element(0), g->element(7)),
                  std::logic_error);
  CHECK_THROWS_AS(tr.add_cipher_pair(g->element(3), g->element(5)),
                  std::logic_error);
  tr.add_perm_pair(g->element(7), g->element(2));
  CHECK_THROWS_AS(tr.add_perm_pair(g->element(7), g->element(9)),
                  std::logic_error);
  CHECK_THROWS_AS(tr.add_perm_pair(g->element(8), g->element(2)),
                  std::logic_error);
  CHECK(tr.output_of(g->element(7))->index == 2);
  CHECK(tr.input_of(g->element(2))->index == 7);
  CHECK(tr.cipher_count() == 1);
  CHECK(tr.perm_count() == 1);
}

TEST_CASE("bad keys are exactly the planted collisions") {
  auto g = Group::zmod(12);
  TranscriptSets tr;
  CHECK(bad_key_count(g, tr) == 0);
  tr.add_cipher_pair(g->element(0), g->element(5));
  tr.add_perm_pair(g->element(7), g->element(2));
  // m + k = x forces k = 7; c - k = y forces k = 3
  for (std::uint64_t k = 0; k < 12; ++k)
    CHECK(is_bad_key(g->element(k), tr) == (k == 7 || k == 3));
  CHECK(bad_key_count(g, tr) == 2);
}

TEST_CASE("script catalog drives every game end to end") {
  const auto catalog = script_catalog();
  CHECK(catalog.size() == 8);
  for (auto kind :
       {GameKind::R, GameKind::X, GameKind::XPrime, GameKind::RPrime}) {
    for (auto g : {Group::zmod(5), Group::bits(2)}) {
      for (const auto& adv : catalog) {
        RandomStream rng(404, g->name() + "/" + adv.name);
        GameState st(kind, g, rng);
        std::vector<Element> answers;
        while (auto q = adv.next(g, answers))
          answers.push_back(st.step(*q, rng));
        CHECK(answers.size() == 2);
        if (kind == GameKind::RPrime) {
          CHECK_FALSE(st.key().has_value());
          st.finalize(rng);
          CHECK(st.key().has_value());
        }
      }
    }
  }
}

TEST_CASE("repeated queries and stale finalization are refused") {
  auto g = Group::zmod(7);
  RandomStream rng(3, "refuse");
  GameState st(GameKind::R, g, rng);
  const Element c = st.step({QueryKind::Enc, g->element(2)}, rng);
  CHECK_THROWS_AS(st.step({QueryKind::Enc, g->element(2)}, rng),
                  std::logic_error);
  CHECK_THROWS_AS(st.step({QueryKind::Dec, c}, rng), std::logic_error);
  const Element y = st.step({QueryKind::PermFwd, g->element(4)}, rng);
  CHECK_THROWS_AS(st.step({QueryKind::PermFwd, g->element(4)}, rng),
                  std::logic_error);
  CHECK_THROWS_AS(st.step({QueryKind::PermInv, y}, rng), std::logic_error);
  CHECK_THROWS_AS(st.finalize(rng), std::logic_error);

  auto other = Group::zmod(5);
  CHECK_THROWS_AS(st.step({QueryKind::Enc, other->element(1)}, rng),
                  std::invalid_argument);
}

TEST_CASE("deferred game flags only at finalization") {
  auto g = Group::zmod(9);
  int flagged = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    RandomStream rng(seed, "deferred");
    GameState st(GameKind::RPrime, g, rng);
    st.step({QueryKind::Enc, g->element(0)}, rng);
    st.step({QueryKind::PermFwd, g->element(4)}, rng);
    CHECK_FALSE(st.flag_bad());
    st.finalize(rng);
    CHECK(st.flag_bad() == is_bad_key(*st.key(), st.transcripts()));
    flagged += st.flag_bad() ? 1 : 0;
    CHECK_THROWS_AS(st.step({QueryKind::Enc, g->element(1)}, rng),
                    std::logic_error);
    CHECK_THROWS_AS(st.finalize(rng), std::logic_error);
  }
  // with one pair per record roughly 2/9 of keys collide
  CHECK(flagged > 0);
  CHECK(flagged < 40);
}

TEST_CASE("repair game forces consistency across oracles") {
  auto g = Group::zmod(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(seed, "force");
    GameState st(GameKind::X, g, rng);
    const Element x1 = g->element(2);
    const Element y1 = st.step({QueryKind::PermFwd, x1}, rng);
    const Element k = *st.key();
    const Element m = g->op(x1, g->inv(k));
    const Element c = st.step({QueryKind::Enc, m}, rng);
    CHECK(c == g->op(y1, k));
    CHECK(st.flag_bad());
    // the flag never clears
    st.step({QueryKind::Enc, g->op(m, g->element(1))}, rng);
    CHECK(st.flag_bad());
  }
}

TEST_CASE("repair game retry rejects stale candidates") {
  auto g = Group::zmod(3);
  bool saw_retry = false;
  bool saw_direct = false;
  for (std::uint64_t seed = 0; seed < 400 && !(saw_retry && saw_direct);
       ++seed) {
    RandomStream rng(seed, "retry");
    GameState st(GameKind::X, g, rng);
    const Element y1 = st.step({QueryKind::PermFwd, g->element(1)}, rng);
    const Element k = *st.key();
    const Element m = g->element(0);
    if (g->op(m, k) == g->element(1)) continue;  // repair path, not a redraw
    const Element c = st.step({QueryKind::Enc, m}, rng);
    // an accepted answer never decodes onto the recorded output
    CHECK(g->op(c, g->inv(k)) != y1);
    if (st.last_retries() > 0) {
      saw_retry = true;
      CHECK(st.flag_bad());
    } else {
      saw_direct = true;
      CHECK_FALSE(st.flag_bad());
    }
  }
  CHECK(saw_retry);
  CHECK(saw_direct);
}

TEST_CASE("table game stays consistent with its cipher view") {
  auto g = Group::zmod(11);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomStream rng(seed, "table");
    GameState st(GameKind::XPrime, g, rng);
    const Element m = g->element(4);
    const Element c = st.step({QueryKind::Enc, m}, rng);
    const Element k = *st.key();
    const Element y = st.step({QueryKind::PermFwd, g->op(m, k)}, rng);
    CHECK(y == g->op(c, g->inv(k)));
    const Element c2 = g->element((c.index + 1) % 11);
    const Element m2 = st.step({QueryKind::Dec, c2}, rng);
    const Element x2 = st.step({QueryKind::PermInv, g->op(c2, g->inv(k))}, rng);
    CHECK(x2 == g->op(m2, k));
  }
}

namespace {

ScriptedAdversary one_enc_script() {
  return {"one-enc",
          [](const GroupRef& g, const std::vector<Element>& answers)
              -> std::optional<GameQuery> {
            if (answers.empty())
              return GameQuery{QueryKind::Enc, g->element(0)};
            return std::nullopt;
          }};
}

}  // namespace

TEST_CASE("every game answers its first cipher query uniformly") {
  auto g = Group::zmod(5);
  const auto adv = one_enc_script();
  for (auto kind :
       {GameKind::R, GameKind::X, GameKind::XPrime, GameKind::RPrime}) {
    const TranscriptDist dist = transcript_distribution(kind, adv, g);
    CHECK(dist.size() == 5);
    for (const auto& [seq, p] : dist) {
      CHECK(seq.size() == 1);
      CHECK(p == Rational(1, 5));
    }
  }
}

TEST_CASE("exact laws agree between the repair and table games") {
  for (auto g : {Group::zmod(3), Group::zmod(4), Group::zmod(5),
                 Group::bits(2)}) {
    for (const auto& adv : script_catalog()) {
      INFO(g->name(), " / ", adv.name);
      const TranscriptDist dx = transcript_distribution(GameKind::X, adv, g);
      const TranscriptDist dxp =
          transcript_distribution(GameKind::XPrime, adv, g);
      CHECK(dx == dxp);
      Rational total(0);
      for (const auto& [seq, p] : dx) total += p;
      CHECK(total == Rational(1));
    }
  }
}

TEST_CASE("exact flag laws agree across the uniform-answer games") {
  for (auto g : {Group::zmod(3), Group::zmod(4), Group::zmod(5),
                 Group::bits(2)}) {
    for (const auto& adv : script_catalog()) {
      INFO(g->name(), " / ", adv.name);
      const Rational watch = bad_probability(GameKind::R, adv, g);
      const Rational deferred = bad_probability(GameKind::RPrime, adv, g);
      const Rational repair = bad_probability(GameKind::X, adv, g);
      CHECK(watch == deferred);
      CHECK(watch == repair);
      CHECK(watch >= 0);
      CHECK(watch <= 1);
      // uniform answers do not depend on the flag bookkeeping
      CHECK(transcript_distribution(GameKind::R, adv, g) ==
            transcript_distribution(GameKind::RPrime, adv, g));
    }
  }
}

TEST_CASE("exact enumeration guards its limits") {
  const auto adv = one_enc_script();
  CHECK_THROWS_AS(transcript_distribution(GameKind::R, adv, Group::zmod(6)),
                  std::length_error);
  CHECK_THROWS_AS(bad_probability(GameKind::XPrime, adv, Group::zmod(4)),
                  std::invalid_argument);
}

TEST_CASE("bad key census respects the budget product") {
  for (auto g : {Group::zmod(64), Group::sym(4)}) {
    RandomStream rng(23, "census/" + g->name());
    for (std::size_t s : {1, 2, 4}) {
      for (std::size_t t : {1, 2, 4}) {
        for (int rep = 0; rep < 25; ++rep) {
          auto rt = rng.fork(std::to_string(s) + "/" + std::to_string(t) +
                             "/" + std::to_string(rep));
          GameState st(GameKind::RPrime, g, rt);
          for (std::size_t i = 0; i < s; ++i)
            st.step({QueryKind::Enc, g->element(i)}, rt);
          for (std::size_t j = 0; j < t; ++j)
            st.step({QueryKind::PermFwd, g->element(j)}, rt);
          const std::uint64_t count = bad_key_count(g, st.transcripts());
          CHECK(count <= 2 * s * t);
          CHECK(Rational(count, g->order()) <=
                Rational(2 * s * t, g->order()));
        }
      }
    }
  }
}

TEST_CASE("random transcripts are consistent and sized to order") {
  auto half = Group::zmod(8);
  RandomStream rng(31, "sigma");
  const PsiTranscript tr = random_psi_transcript(half, 5, 3, 3, rng);
  CHECK(tr.cipher.size() == 5);
  CHECK(tr.f_pairs.size() == 3);
  CHECK(tr.g_pairs.size() == 3);
  CHECK(consistent_transcript(tr));
  CHECK(tr.cipher[0].dir == PsiDir::Forward);
  CHECK(tr.cipher[1].dir == PsiDir::Backward);
  PsiTranscript broken = tr;
  broken.cipher.push_back(
      {PsiDir::Forward, tr.cipher[0].x, FeistelState{half->element(0),
                                                     half->element(1)}});
  CHECK_FALSE(consistent_transcript(broken));
  CHECK_THROWS_AS(random_psi_transcript(half, 65, 0, 0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(random_psi_transcript(half, 0, 9, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("outer-round collision detector") {
  auto half = Group::zmod(16);
  RandomStream rng(11, "outer");
  PsiKey k{half->sample(rng), half->sample(rng)};

  // no direct queries to the outer function, never bad
  const PsiTranscript none = random_psi_transcript(half, 3, 2, 0, rng);
  CHECK_FALSE(badg_detect(none, k));

  // planted hit on the plaintext side
  PsiTranscript fwd = random_psi_transcript(half, 2, 0, 1, rng);
  fwd.g_pairs[0].first = half->op(fwd.cipher[0].x.right, k.right);
  CHECK(badg_detect(fwd, k));

  // planted hit on the ciphertext side
  PsiTranscript bwd = random_psi_transcript(half, 2, 0, 1, rng);
  bwd.g_pairs[0].first = half->op(bwd.cipher[1].y.left, half->inv(k.left));
  CHECK(badg_detect(bwd, k));

  // frequency over fresh keys against a fixed transcript
  const PsiTranscript sigma = random_psi_transcript(half, 2, 0, 2, rng);
  const int trials = 10000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    PsiKey kk{half->sample(rng), half->sample(rng)};
    hits += badg_detect(sigma, kk) ? 1 : 0;
  }
  const double freq = static_cast<double>(hits) / trials;
  const double bound = 2.0 * 2 * 2 / 16;
  CHECK(freq <= bound + hoeffding_halfwidth(trials));
  CHECK(freq > 0.0);
}

TEST_CASE("middle-round collision detector") {
  auto half = Group::zmod(64);
  RandomStream rng(13, "middle");
  PsiKey k{half->sample(rng), half->sample(rng)};

  // all five events need a cipher pair
  PsiTranscript none = random_psi_transcript(half, 0, 3, 2, rng);
  LazyFunction g0(half, half, rng.fork("g0"));
  CHECK_FALSE(bad_detect(none, k, g0));

  // planted collision between a forced input and a direct query
  PsiTranscript hit2 = random_psi_transcript(half, 2, 1, 0, rng);
  LazyFunction g1(half, half, rng.fork("g1"));
  hit2.f_pairs[0].first = psi_middle_inputs(hit2, k, g1).round2[1];
  CHECK(bad_detect(hit2, k, g1));

  PsiTranscript hit3 = random_psi_transcript(half, 2, 1, 0, rng);
  LazyFunction g2(half, half, rng.fork("g2"));
  hit3.f_pairs[0].first = psi_middle_inputs(hit3, k, g2).round3[0];
  CHECK(bad_detect(hit3, k, g2));

  // frequency over fresh keys and outer functions
  const PsiTranscript sigma = random_psi_transcript(half, 2, 2, 0, rng);
  const int trials = 10000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    PsiKey kk{half->sample(rng), half->sample(rng)};
    LazyFunction gg(half, half, rng.fork("mc/" + std::to_string(t)));
    hits += bad_detect(sigma, kk, gg) ? 1 : 0;
  }
  const double freq = static_cast<double>(hits) / trials;
  const double bound = (2.0 * 2 + 2 * 2 * 2 + 2 * 1) / 64;
  CHECK(freq <= bound + hoeffding_halfwidth(trials));
  CHECK(freq > 0.0);
}

TEST_CASE("a clean transcript is explained by the cipher") {
  for (auto half : {Group::zmod(64), Group::sym(4)}) {
    RandomStream rng(17, "explain/" + half->name());
    int explained = 0;
    for (int t = 0; t < 150; ++t) {
      auto rt = rng.fork("t/" + std::to_string(t));
      const PsiTranscript sigma = random_psi_transcript(half, 2, 1, 1, rt);
      PsiKey k{half->sample(rt), half->sample(rt)};
      LazyFunction g(half, half, rt.fork("g"));
      if (bad_detect(sigma, k, g)) continue;
      CHECK(psi_explains_transcript(sigma, k, g));
      ++explained;
    }
    CHECK(explained > 50);
  }
}

TEST_CASE("replay oracle follows its three rules") {
  auto half = Group::zmod(4);
  RandomStream rng(5, "replay");
  RTildeOracle rt(half);
  const FeistelState a{half->element(1), half->element(2)};
  const FeistelState y = rt.query(PsiDir::Forward, a, rng);
  const FeistelState y2 = rt.query(PsiDir::Forward, a, rng);
  CHECK(y == y2);
  const FeistelState x = rt.query(PsiDir::Backward, y, rng);
  CHECK(x == a);
  CHECK(rt.transcript().size() == 3);
  CHECK_FALSE(rt.inconsistent());
}

TEST_CASE("replay oracle inconsistency rate matches the pair count") {
  auto half = Group::zmod(4);
  const int trials = 100000;
  int bad = 0;
  for (int t = 0; t < trials; ++t) {
    RandomStream rng(t, "replay/freq");
    RTildeOracle rt(half);
    rt.query(PsiDir::Forward,
             FeistelState{half->element(0), half->element(0)}, rng);
    rt.query(PsiDir::Forward,
             FeistelState{half->element(0), half->element(1)}, rng);
    bad += rt.inconsistent() ? 1 : 0;
  }
  const double freq = static_cast<double>(bad) / trials;
  // one pair of fresh queries collides on the drawn side 1/|G^2| of the time
  const double rate = 1.0 / 16;
  const double ci = hoeffding_halfwidth(trials);
  CHECK(freq <= rate + ci);
  CHECK(freq >= rate - ci);
}

TEST_CASE("advantage bound formulas") {
  CHECK(em_sprp_bound(16, 16, 65536) == Rational(1, 128));
  CHECK(em_sprp_bound(1, 1, 4) == Rational(1, 2));
  CHECK(psi_bound_stated(1, 0, 0, 7) == Rational(2, 7));
  CHECK(psi_bound_accumulated(1, 0, 0, 7) == Rational(2, 7));
  CHECK(psi_bound_stated(2, 1, 1, 16) == Rational(241, 128));
  CHECK(psi_bound_accumulated(2, 1, 1, 16) == Rational(257, 128));
  for (std::uint64_t qc = 0; qc <= 4; ++qc)
    for (std::uint64_t qf = 0; qf <= 4; ++qf)
      for (std::uint64_t qg = 0; qg <= 4; ++qg) {
        const Rational stated = psi_bound_stated(qc, qf, qg, 32);
        CHECK(psi_bound_accumulated(qc, qf, qg, 32) >= stated);
        CHECK(psi_bound_total(qc + qf + qg, 32) >= stated);
      }
  CHECK_THROWS_AS(psi_bound_stated(1, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(em_sprp_bound(1, 1, 0), std::invalid_argument);
}

TEST_CASE("lemma reports serialize with all fields") {
  const LemmaReport r{"flag-equality", "zmod:4 enc-perm", "5/9", "5/9",
                      "1/2", true};
  const auto parsed = nlohmann::json::parse(to_json(r));
  CHECK(parsed.at("lemma") == "flag-equality");
  CHECK(parsed.at("instance") == "zmod:4 enc-perm");
  CHECK(parsed.at("lhs") == "5/9");
  CHECK(parsed.at("rhs") == "5/9");
  CHECK(parsed.at("bound") == "1/2");
  CHECK(parsed.at("verdict") == true);
  CHECK(parsed.size() == 6);
}
