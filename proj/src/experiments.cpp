#include "gclab/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "gclab/attacks.hpp"
#include "gclab/even_mansour.hpp"
#include "gclab/feistel.hpp"
#include "gclab/group.hpp"
#include "gclab/oracles.hpp"
#include "gclab/proof_games.hpp"
#include "gclab/rng.hpp"

namespace gclab {

namespace {

namespace on = oracle_names;

constexpr const char* kBudgetKeys[] = {"d",   "s",   "t", "q_c",
                                       "q_f", "q_g", "r", "q"};

bool is_budget_key(const std::string& key) {
  for (const char* k : kBudgetKeys)
    if (key == k) return true;
  return false;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (value.empty() ||
      value.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("value for '" + key +
                                "' must be a nonnegative integer, got '" +
                                value + "'");
  try {
    return std::stoull(value);
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("value for '" + key + "' overflows: '" +
                                value + "'");
  }
}

/// Square products host the two-half constructions; everything else is a
/// configuration error worth naming.
GroupRef square_half(const GroupRef& gp) {
  if (gp->kind() != GroupKind::Product || !gp->left()->same(*gp->right()))
    throw std::invalid_argument(
        "group must be a square product (prod:<G>,<G>), got '" + gp->name() +
        "'");
  return gp->left();
}

/// Every row carries the inputs needed to rerun it.
std::string base_params(const ExperimentConfig& cfg,
                        std::initializer_list<const char*> keys) {
  std::string out = "trials=" + std::to_string(*cfg.trials) +
                    " seed=" + std::to_string(*cfg.seed);
  for (const char* k : keys)
    out += std::string(" ") + k + "=" + std::to_string(cfg.budgets.at(k));
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

// ---------------------------------------------------------------------------
// Experiment bodies.  Each receives a finalized config: group/trials/seed
// are set and every budget key the experiment declares is present.

std::vector<ResultRow> run_em_roundtrip(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  std::uint64_t failures = 0;
  RandomStream root(*cfg.seed, "em-roundtrip");
  for (std::uint64_t t = 0; t < *cfg.trials; ++t) {
    RandomStream rt = root.fork(std::to_string(t));
    LazyPermutation perm(g, rt.fork("perm"));
    const EmKey key{g->sample(rt)};
    const Element m = g->sample(rt);
    if (!(em_decrypt(perm, key, em_encrypt(perm, key, m)) == m)) ++failures;
    const Element c = g->sample(rt);
    if (!(em_encrypt(perm, key, em_decrypt(perm, key, c)) == c)) ++failures;
  }
  return {exact_bound_row(cfg.experiment, g->name(), base_params(cfg, {}),
                          Rational(failures), "roundtrip-failures",
                          Rational(0))};
}

std::vector<ResultRow> run_em_multi_roundtrip(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  const std::uint64_t rounds = cfg.budgets.at("r");
  if (rounds == 0) throw std::invalid_argument("r must be >= 1");
  std::uint64_t failures = 0;
  RandomStream root(*cfg.seed, "em-multi-roundtrip");
  for (std::uint64_t t = 0; t < *cfg.trials; ++t) {
    RandomStream rt = root.fork(std::to_string(t));
    std::vector<LazyPermutation> perms;
    perms.reserve(rounds);
    EmMultiKey key;
    for (std::uint64_t i = 0; i < rounds; ++i) {
      perms.emplace_back(g, rt.fork("perm/" + std::to_string(i)));
      key.keys.push_back(g->sample(rt));
    }
    for (auto& p : perms) key.perms.push_back(&p);
    const Element m = g->sample(rt);
    if (!(em_multi_decrypt(key, em_multi_encrypt(key, m)) == m)) ++failures;
  }
  return {exact_bound_row(cfg.experiment, g->name(), base_params(cfg, {"r"}),
                          Rational(failures), "roundtrip-failures",
                          Rational(0))};
}

std::vector<ResultRow> run_feistel_roundtrip(const ExperimentConfig& cfg) {
  const GroupRef gp = Group::parse(cfg.group_spec);
  const GroupRef half = square_half(gp);
  const std::uint64_t rounds = cfg.budgets.at("r");
  std::uint64_t failures = 0;
  RandomStream root(*cfg.seed, "feistel-roundtrip");
  for (std::uint64_t t = 0; t < *cfg.trials; ++t) {
    RandomStream rt = root.fork(std::to_string(t));
    FeistelSpec spec;
    for (std::uint64_t i = 0; i < rounds; ++i)
      spec.rounds.push_back(lazy_round_fn(half, rt.fork("f/" + std::to_string(i))));
    const FeistelState s{half->sample(rt), half->sample(rt)};
    if (!(feistel_decrypt(spec, feistel_encrypt(spec, s)) == s)) ++failures;
  }
  return {exact_bound_row(cfg.experiment, gp->name(), base_params(cfg, {"r"}),
                          Rational(failures), "roundtrip-failures",
                          Rational(0))};
}

std::vector<ResultRow> run_psi_roundtrip(const ExperimentConfig& cfg) {
  const GroupRef gp = Group::parse(cfg.group_spec);
  const GroupRef half = square_half(gp);
  std::uint64_t failures = 0;
  RandomStream root(*cfg.seed, "psi-roundtrip");
  for (std::uint64_t t = 0; t < *cfg.trials; ++t) {
    RandomStream rt = root.fork(std::to_string(t));
    LazyFunction f(half, half, rt.fork("f"));
    LazyFunction g(half, half, rt.fork("g"));
    const PsiKey key{half->sample(rt), half->sample(rt)};
    const FeistelState s{half->sample(rt), half->sample(rt)};
    if (!(psi_decrypt(f, g, key, psi_encrypt(f, g, key, s)) == s)) ++failures;
  }
  return {exact_bound_row(cfg.experiment, gp->name(), base_params(cfg, {}),
                          Rational(failures), "roundtrip-failures",
                          Rational(0))};
}

std::vector<ResultRow> run_sc_roundtrip(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  const std::uint64_t rounds = cfg.budgets.at("r");
  std::uint64_t failures = 0;
  RandomStream root(*cfg.seed, "sc-roundtrip");
  for (std::uint64_t t = 0; t < *cfg.trials; ++t) {
    RandomStream rt = root.fork(std::to_string(t));
    const ShuffleParams params =
        random_shuffle_params(g, rounds, rt.fork("params"));
    const Element x = g->sample(rt);
    if (!(sc_inverse(params, sc_shuffle(params, x)) == x)) ++failures;
  }
  return {exact_bound_row(cfg.experiment, g->name(), base_params(cfg, {"r"}),
                          Rational(failures), "roundtrip-failures",
                          Rational(0))};
}

std::vector<ResultRow> run_sn_properties(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  if (g->kind() != GroupKind::Cyclic)
    throw std::invalid_argument(
        "swap rounds pair X with K - X; the group must be zmod:<N>");
  if (g->order() > 4096)
    throw std::invalid_argument("exhaustive sweeps need order <= 4096");
  const std::uint64_t rounds = cfg.budgets.at("r");
  const std::uint64_t n = g->order();
  RandomStream root(*cfg.seed, "sn-properties");
  std::uint64_t bij_failures = 0;
  std::uint64_t invol_failures = 0;
  for (std::uint64_t t = 0; t < *cfg.trials; ++t) {
    RandomStream rt = root.fork(std::to_string(t));
    const ShuffleParams params =
        random_shuffle_params(g, rounds, rt.fork("params"));
    std::set<std::uint64_t> image;
    for (std::uint64_t x = 0; x < n; ++x)
      image.insert(sn_shuffle(params, g->element(x)).index);
    if (image.size() != n) ++bij_failures;
    const ShuffleParams one = random_shuffle_params(g, 1, rt.fork("round"));
    for (std::uint64_t x = 0; x < n; ++x) {
      const Element e = g->element(x);
      if (!(sn_shuffle(one, sn_shuffle(one, e)) == e)) ++invol_failures;
    }
  }
  const std::string base = base_params(cfg, {"r"});
  return {
      exact_bound_row(cfg.experiment, g->name(), base + " stat=image-sweep",
                      Rational(bij_failures), "bijectivity-failures",
                      Rational(0)),
      exact_bound_row(cfg.experiment, g->name(),
                      base + " stat=double-round-sweep",
                      Rational(invol_failures), "involution-failures",
                      Rational(0)),
  };
}

std::vector<ResultRow> run_slide_attack(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  const std::uint64_t d = cfg.budgets.at("d");
  const std::uint64_t trials = *cfg.trials;
  RandomStream root(*cfg.seed, "slide-attack");
  std::uint64_t cross_hits = 0;
  std::uint64_t same_hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomStream rt = root.fork(std::to_string(t));
    LazyPermutation perm(g, rt.fork("perm"));
    const EmKey key{g->sample(rt)};
    const PointFn enc = [&perm, &key](const Element& x) {
      return em_encrypt(perm, key, x);
    };
    const PointFn pub = [&perm](const Element& x) { return perm.eval(x); };
    RandomStream cross_rng = rt.fork("cross");
    const std::optional<Element> cross =
        slide_attack(g, enc, pub, d, cross_rng);
    if (cross && *cross == key.key) ++cross_hits;
    RandomStream same_rng = rt.fork("same");
    const std::optional<Element> same =
        slide_attack_same_index(g, enc, pub, d, same_rng);
    if (same && *same == key.key) ++same_hits;
  }
  const double n = static_cast<double>(g->order());
  const double cross_rate = static_cast<double>(cross_hits) / trials;
  const double same_rate = static_cast<double>(same_hits) / trials;
  // chance of at least one slid pair among d*d cross pairs
  const double oracle =
      1.0 - std::pow(1.0 - 1.0 / n, static_cast<double>(d) * d);
  const double hw = hoeffding_halfwidth(trials);
  const std::string base = base_params(cfg, {"d"});
  return {
      info_row(cfg.experiment, g->name(), base + " stat=cross-index-rate",
               format_decimal(cross_rate)),
      mc_bound_row(cfg.experiment, g->name(),
                   base + " oracle=" + format_decimal(oracle),
                   std::fabs(cross_rate - oracle), 0.0, "cross-index-band",
                   0.07),
      info_row(cfg.experiment, g->name(), base + " stat=same-index-rate",
               format_decimal(same_rate)),
      mc_bound_row(cfg.experiment, g->name(),
                   base + " expected=" + format_decimal(d / n),
                   std::fabs(same_rate - d / n), 0.0, "same-index-band", hw),
  };
}

std::vector<ResultRow> run_feistel_adv(const ExperimentConfig& cfg,
                                       std::uint64_t rounds,
                                       const Distinguisher& dist) {
  const GroupRef gp = Group::parse(cfg.group_spec);
  square_half(gp);
  RandomStream rng(*cfg.seed, cfg.experiment);
  const AdvantageEstimate est =
      run_distinguisher_game(make_feistel_world(gp, rounds),
                             make_ideal_world(gp), dist, *cfg.trials, rng);
  const double floor = 0.95;
  const std::string base = base_params(cfg, {});
  return {
      info_row(cfg.experiment, gp->name(),
               base + " stat=advantage p_real=" + format_decimal(est.p_real) +
                   " p_ideal=" + format_decimal(est.p_ideal),
               format_decimal(est.advantage)),
      mc_bound_row(cfg.experiment, gp->name(), base + " floor=0.95",
                   floor - est.advantage, 2 * est.ci_halfwidth,
                   "floor-shortfall", 0.0),
  };
}

std::vector<ResultRow> run_feistel1_adv(const ExperimentConfig& cfg) {
  return run_feistel_adv(cfg, 1, feistel1_distinguisher);
}

std::vector<ResultRow> run_feistel2_adv(const ExperimentConfig& cfg) {
  return run_feistel_adv(cfg, 2, feistel2_distinguisher);
}

std::vector<ResultRow> run_feistel3_sprp(const ExperimentConfig& cfg) {
  const GroupRef gp = Group::parse(cfg.group_spec);
  const GroupRef half = square_half(gp);
  const std::uint64_t trials = *cfg.trials;
  WorldOptions opt;
  opt.backward = true;
  RandomStream rng(*cfg.seed, "feistel3-sprp");
  const AdvantageEstimate est = run_distinguisher_game(
      make_feistel_world(gp, 3, opt), make_ideal_world(gp, opt),
      feistel3_sprp_attack, trials, rng);
  const auto real_count =
      static_cast<std::uint64_t>(std::llround(est.p_real * trials));
  const std::string base = base_params(cfg, {});
  return {
      exact_equality_row(cfg.experiment, gp->name(), base,
                         Rational(real_count, trials), "real-acceptance",
                         Rational(1)),
      mc_bound_row(cfg.experiment, gp->name(), base, est.p_ideal,
                   est.ci_halfwidth, "ideal-acceptance-cap",
                   3.0 / static_cast<double>(half->order())),
      info_row(cfg.experiment, gp->name(), base + " stat=advantage",
               format_decimal(est.advantage)),
  };
}

std::vector<ResultRow> run_em_sprp_bound(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  const std::uint64_t s = cfg.budgets.at("s");
  const std::uint64_t t = cfg.budgets.at("t");
  const std::uint64_t d = cfg.budgets.at("d");
  WorldOptions opt;
  opt.backward = true;
  opt.public_perm = true;
  opt.cipher_budget = s;
  opt.perm_budget = t;
  const WorldFactory real = make_em_world(g, opt);
  const WorldFactory ideal = make_ideal_world(g, opt);
  const double bound = em_sprp_bound(s, t, g->order()).convert_to<double>();
  const std::string base = base_params(cfg, {"s", "t", "d"});
  struct Entry {
    const char* name;
    Distinguisher dist;
  };
  const Entry entries[] = {
      {"slide-cross", make_slide_distinguisher(d, false)},
      {"slide-same", make_slide_distinguisher(d, true)},
      {"translation", sc_translation_distinguisher},
      {"coin", coin_distinguisher},
  };
  RandomStream root(*cfg.seed, "em-sprp-bound");
  std::vector<ResultRow> rows;
  for (const Entry& e : entries) {
    RandomStream rng = root.fork(e.name);
    const AdvantageEstimate est =
        run_distinguisher_game(real, ideal, e.dist, *cfg.trials, rng);
    const std::string params = base + " dist=" + e.name;
    rows.push_back(info_row(
        cfg.experiment, g->name(),
        params + " stat=advantage p_real=" + format_decimal(est.p_real) +
            " p_ideal=" + format_decimal(est.p_ideal),
        format_decimal(est.advantage)));
    rows.push_back(mc_bound_row(cfg.experiment, g->name(), params,
                                est.advantage, 2 * est.ci_halfwidth,
                                "sprp-bound", bound));
  }
  return rows;
}

std::vector<ResultRow> run_em_efp(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  const std::uint64_t s = cfg.budgets.at("s");
  const std::uint64_t t = cfg.budgets.at("t");
  const std::uint64_t d = cfg.budgets.at("d");
  const std::uint64_t trials = *cfg.trials;
  const double n = static_cast<double>(g->order());
  const double hw = hoeffding_halfwidth(trials);
  const std::string base = base_params(cfg, {"s", "t", "d"});

  const EfpAdversary guesser = [](const GroupRef& gg, OracleBundle&,
                                  RandomStream& adv) {
    return ForgeryClaim{gg->sample(adv), gg->sample(adv)};
  };
  // Key recovery first, then one extra public query forges a fresh pair.
  // Budget exhaustion anywhere degrades to a losing identity claim.
  const EfpAdversary forger = [d](const GroupRef& gg, OracleBundle& world,
                                  RandomStream& adv) -> ForgeryClaim {
    std::set<std::uint64_t> asked;
    const PointFn enc = [&world, &asked](const Element& x) {
      asked.insert(x.index);
      return world.query(on::kForward, x);
    };
    const PointFn pub = [&world](const Element& x) {
      return world.query(on::kPerm, x);
    };
    try {
      const std::optional<Element> key = slide_attack(gg, enc, pub, d, adv);
      if (!key) return ForgeryClaim{gg->identity(), gg->identity()};
      Element m = gg->sample(adv);
      while (asked.count(m.index) != 0) m = gg->sample(adv);
      const Element c = gg->op(pub(gg->op(m, *key)), *key);
      return ForgeryClaim{m, c};
    } catch (const QueryBudgetError&) {
      return ForgeryClaim{gg->identity(), gg->identity()};
    }
  };

  struct Entry {
    const char* name;
    const EfpAdversary* adv;
    const char* bound_name;
    double bound;
  };
  const Entry entries[] = {
      {"random-guess", &guesser, "guess-rate-cap", 1.0 / n},
      {"slide-forger", &forger, "budget-product-cap", 2.0 * s * t / n},
  };
  RandomStream root(*cfg.seed, "em-efp");
  std::vector<ResultRow> rows;
  for (const Entry& e : entries) {
    std::uint64_t wins = 0;
    for (std::uint64_t tr = 0; tr < trials; ++tr) {
      RandomStream game =
          root.fork(std::string(e.name) + "/" + std::to_string(tr));
      if (run_efp_game(g, s, t, *e.adv, game)) ++wins;
    }
    const double rate = static_cast<double>(wins) / trials;
    const std::string params = base + " adversary=" + e.name;
    rows.push_back(info_row(cfg.experiment, g->name(),
                            params + " stat=success-rate",
                            format_decimal(rate)));
    rows.push_back(mc_bound_row(cfg.experiment, g->name(), params, rate, hw,
                                e.bound_name, e.bound));
  }
  return rows;
}

std::vector<ResultRow> run_em_cp(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  const std::uint64_t s = cfg.budgets.at("s");
  const std::uint64_t t = cfg.budgets.at("t");
  const std::uint64_t d = cfg.budgets.at("d");
  const std::uint64_t trials = *cfg.trials;
  const double n = static_cast<double>(g->order());
  const double hw = hoeffding_halfwidth(trials);
  const std::string base = base_params(cfg, {"s", "t", "d"});

  const CpAdversary guesser = [](const GroupRef& gg, const Element&,
                                 OracleBundle&, RandomStream& adv) {
    return gg->sample(adv);
  };
  // Key recovery turns the challenge into a local decryption.  Budget
  // exhaustion anywhere degrades to a losing identity guess.
  const CpAdversary cracker = [d](const GroupRef& gg, const Element& c0,
                                  OracleBundle& world,
                                  RandomStream& adv) -> Element {
    const PointFn enc = [&world](const Element& x) {
      return world.query(on::kForward, x);
    };
    const PointFn pub = [&world](const Element& x) {
      return world.query(on::kPerm, x);
    };
    try {
      const std::optional<Element> key = slide_attack(gg, enc, pub, d, adv);
      if (!key) return gg->identity();
      const Element inner =
          world.query(on::kPermInv, gg->op(c0, gg->inv(*key)));
      return gg->op(inner, gg->inv(*key));
    } catch (const QueryBudgetError&) {
      return gg->identity();
    }
  };

  const double slide_rate =
      1.0 - std::pow(1.0 - 1.0 / n, static_cast<double>(d) * d);
  const double cracker_oracle = slide_rate + (1.0 - slide_rate) / n;
  struct Entry {
    const char* name;
    const CpAdversary* adv;
  };
  const Entry entries[] = {
      {"random-guess", &guesser},
      {"slide-cracker", &cracker},
  };
  RandomStream root(*cfg.seed, "em-cp");
  std::vector<ResultRow> rows;
  for (const Entry& e : entries) {
    std::uint64_t wins = 0;
    for (std::uint64_t tr = 0; tr < trials; ++tr) {
      RandomStream game =
          root.fork(std::string(e.name) + "/" + std::to_string(tr));
      if (run_cp_game(g, s, t, *e.adv, game)) ++wins;
    }
    const double rate = static_cast<double>(wins) / trials;
    const std::string params = base + " adversary=" + e.name;
    rows.push_back(info_row(cfg.experiment, g->name(),
                            params + " stat=success-rate",
                            format_decimal(rate)));
    if (std::string(e.name) == "random-guess") {
      rows.push_back(mc_bound_row(cfg.experiment, g->name(), params, rate, hw,
                                  "guess-rate-cap", 1.0 / n));
    } else {
      rows.push_back(mc_bound_row(cfg.experiment, g->name(), params, rate, hw,
                                  "budget-product-cap", 2.0 * s * t / n));
      rows.push_back(mc_bound_row(
          cfg.experiment, g->name(),
          params + " oracle=" + format_decimal(cracker_oracle),
          std::fabs(rate - cracker_oracle), 0.0, "slide-rate-band", hw));
    }
  }
  return rows;
}

std::vector<ResultRow> run_bad_keys(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  if (g->order() > 4096)
    throw std::invalid_argument(
        "the key census enumerates the group; order <= 4096 required");
  if (g->order() < 4)
    throw std::invalid_argument(
        "the (s,t)=4 cells need four distinct fresh queries; order >= 4 "
        "required");
  const std::uint64_t trials = *cfg.trials;
  RandomStream root(*cfg.seed, "bad-keys");
  std::vector<ResultRow> rows;
  for (std::uint64_t s : {1, 2, 4}) {
    for (std::uint64_t t : {1, 2, 4}) {
      std::uint64_t worst = 0;
      for (std::uint64_t rep = 0; rep < trials; ++rep) {
        RandomStream rt = root.fork(std::to_string(s) + "/" +
                                    std::to_string(t) + "/" +
                                    std::to_string(rep));
        GameState st(GameKind::RPrime, g, rt);
        for (std::uint64_t i = 0; i < s; ++i) {
          Element m = g->sample(rt);
          while (st.transcripts().has_plain(m)) m = g->sample(rt);
          st.step({QueryKind::Enc, m}, rt);
        }
        for (std::uint64_t j = 0; j < t; ++j) {
          Element x = g->sample(rt);
          while (st.transcripts().has_perm_input(x)) x = g->sample(rt);
          st.step({QueryKind::PermFwd, x}, rt);
        }
        worst = std::max(worst, bad_key_count(g, st.transcripts()));
      }
      const std::string params = base_params(cfg, {}) +
                                 " s=" + std::to_string(s) +
                                 " t=" + std::to_string(t);
      rows.push_back(exact_bound_row(cfg.experiment, g->name(), params,
                                     Rational(worst), "count-cap",
                                     Rational(2 * s * t)));
      rows.push_back(exact_bound_row(cfg.experiment, g->name(), params,
                                     Rational(worst, g->order()),
                                     "fraction-cap",
                                     Rational(2 * s * t, g->order())));
    }
  }
  return rows;
}

std::vector<ResultRow> run_psi_bad_events(const ExperimentConfig& cfg) {
  const GroupRef gp = Group::parse(cfg.group_spec);
  const GroupRef half = square_half(gp);
  const std::uint64_t qc = cfg.budgets.at("q_c");
  const std::uint64_t qf = cfg.budgets.at("q_f");
  const std::uint64_t qg = cfg.budgets.at("q_g");
  const std::uint64_t trials = *cfg.trials;
  const double n = static_cast<double>(half->order());
  const double outer_cap = 2.0 * qg * qc / n;
  const double pairs = qc < 2 ? 0.0 : static_cast<double>(qc) * (qc - 1);
  const double middle_cap =
      (static_cast<double>(qc) * qc + 2.0 * qf * qc + pairs) / n;
  const double hw = hoeffding_halfwidth(trials);
  constexpr std::uint64_t kTranscripts = 20;
  RandomStream root(*cfg.seed, "psi-bad-events");
  std::vector<ResultRow> rows;
  for (std::uint64_t i = 0; i < kTranscripts; ++i) {
    RandomStream srng = root.fork("sigma/" + std::to_string(i));
    const PsiTranscript sigma = random_psi_transcript(half, qc, qf, qg, srng);
    std::uint64_t outer_hits = 0;
    std::uint64_t middle_hits = 0;
    for (std::uint64_t tr = 0; tr < trials; ++tr) {
      RandomStream drng =
          root.fork("draw/" + std::to_string(i) + "/" + std::to_string(tr));
      const PsiKey key{half->sample(drng), half->sample(drng)};
      if (badg_detect(sigma, key)) ++outer_hits;
      LazyFunction gfun(half, half, drng.fork("g"));
      if (bad_detect(sigma, key, gfun)) ++middle_hits;
    }
    const std::string params = base_params(cfg, {"q_c", "q_f", "q_g"}) +
                               " transcript=" + std::to_string(i);
    rows.push_back(mc_bound_row(cfg.experiment, gp->name(), params,
                                static_cast<double>(outer_hits) / trials, hw,
                                "outer-collision-cap", outer_cap));
    rows.push_back(mc_bound_row(cfg.experiment, gp->name(), params,
                                static_cast<double>(middle_hits) / trials, hw,
                                "middle-collision-cap", middle_cap));
  }
  return rows;
}

std::vector<ResultRow> run_psi_bound(const ExperimentConfig& cfg) {
  const GroupRef gp = Group::parse(cfg.group_spec);
  const GroupRef half = square_half(gp);
  const std::uint64_t qc = cfg.budgets.at("q_c");
  const std::uint64_t qf = cfg.budgets.at("q_f");
  const std::uint64_t qg = cfg.budgets.at("q_g");
  WorldOptions opt;
  opt.backward = true;
  opt.round_fns = true;
  opt.cipher_budget = qc;
  opt.f_budget = qf;
  opt.g_budget = qg;
  const WorldFactory real = make_psi_world(gp, opt);
  const WorldFactory ideal = make_ideal_world(gp, opt);
  const double stated =
      psi_bound_stated(qc, qf, qg, half->order()).convert_to<double>();
  const double accumulated =
      psi_bound_accumulated(qc, qf, qg, half->order()).convert_to<double>();
  const std::string base = base_params(cfg, {"q_c", "q_f", "q_g"});
  struct Entry {
    const char* name;
    Distinguisher dist;
  };
  const Entry entries[] = {
      {"three-round-probe", feistel3_sprp_attack},
      {"translation", sc_translation_distinguisher},
  };
  RandomStream root(*cfg.seed, "psi-bound");
  std::vector<ResultRow> rows;
  for (const Entry& e : entries) {
    RandomStream rng = root.fork(e.name);
    const AdvantageEstimate est =
        run_distinguisher_game(real, ideal, e.dist, *cfg.trials, rng);
    const std::string params = base + " dist=" + e.name;
    rows.push_back(info_row(
        cfg.experiment, gp->name(),
        params + " stat=advantage p_real=" + format_decimal(est.p_real) +
            " p_ideal=" + format_decimal(est.p_ideal),
        format_decimal(est.advantage)));
    rows.push_back(mc_bound_row(cfg.experiment, gp->name(), params,
                                est.advantage, 2 * est.ci_halfwidth,
                                "stated-bound", stated));
    rows.push_back(mc_bound_row(cfg.experiment, gp->name(), params,
                                est.advantage, 2 * est.ci_halfwidth,
                                "accumulated-bound", accumulated));
  }
  return rows;
}

std::vector<ResultRow> run_game_equivalence(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  const std::string base = base_params(cfg, {});
  std::vector<ResultRow> rows;
  for (const ScriptedAdversary& adv : script_catalog()) {
    const std::string params = base + " script=" + adv.name;
    const TranscriptDist dx = transcript_distribution(GameKind::X, adv, g);
    const TranscriptDist dxp =
        transcript_distribution(GameKind::XPrime, adv, g);
    std::map<std::vector<std::uint64_t>, Rational> diff;
    for (const auto& [seq, p] : dx) diff[seq] += p;
    for (const auto& [seq, p] : dxp) diff[seq] -= p;
    Rational tv(0);
    for (const auto& [seq, p] : diff) tv += abs(p);
    tv /= 2;
    rows.push_back(exact_bound_row(cfg.experiment, g->name(), params, tv,
                                   "repair-vs-table-tv", Rational(0)));
    const Rational watch = bad_probability(GameKind::R, adv, g);
    rows.push_back(exact_equality_row(
        cfg.experiment, g->name(), params, watch, "watch-vs-deferred-flag",
        bad_probability(GameKind::RPrime, adv, g)));
    rows.push_back(exact_equality_row(cfg.experiment, g->name(), params,
                                      watch, "watch-vs-repair-flag",
                                      bad_probability(GameKind::X, adv, g)));
  }
  return rows;
}

std::vector<ResultRow> run_mixing(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  const std::uint64_t rounds = cfg.budgets.at("r");
  if (rounds == 0) throw std::invalid_argument("r must be >= 1");
  if (g->order() > 4096)
    throw std::invalid_argument(
        "the exact computation holds a full distribution; order <= 4096 "
        "required");
  const Distribution after = single_card_distribution(g, rounds, g->identity());
  const Rational tvd = total_variation(after, uniform_distribution(g));
  using boost::multiprecision::cpp_int;
  const Rational closed(cpp_int(g->order() - 1), cpp_int(g->order()) << rounds);
  const std::string base = base_params(cfg, {"r"}) + " q=1";
  return {
      mc_bound_row(cfg.experiment, g->name(), base, tvd.convert_to<double>(),
                   0.0, "ncpa-mixing-bound",
                   thm62_bound(static_cast<double>(g->order()), 1.0,
                               static_cast<double>(rounds))),
      exact_equality_row(cfg.experiment, g->name(), base, tvd, "closed-form",
                         closed),
  };
}

std::vector<ResultRow> run_sc_structure(const ExperimentConfig& cfg) {
  const GroupRef g = Group::parse(cfg.group_spec);
  if (g->order() > 4096)
    throw std::invalid_argument(
        "the exhaustive translation sweep needs order <= 4096");
  const std::uint64_t rounds = cfg.budgets.at("r");
  const std::uint64_t trials = *cfg.trials;
  RandomStream root(*cfg.seed, "sc-structure");
  std::uint64_t failures = 0;
  const std::vector<Element> all = g->enumerate();
  for (std::uint64_t t = 0; t < trials; ++t) {
    const ShuffleParams params =
        random_shuffle_params(g, rounds, root.fork("p/" + std::to_string(t)));
    const Element shift = sc_shuffle(params, g->identity());
    for (const Element& x : all)
      if (!(sc_shuffle(params, x) == g->op(shift, x))) ++failures;
  }
  RandomStream grng = root.fork("game");
  const AdvantageEstimate est = run_distinguisher_game(
      make_sc_world(g, rounds), make_ideal_world(g),
      sc_translation_distinguisher, trials, grng);
  const auto real_count =
      static_cast<std::uint64_t>(std::llround(est.p_real * trials));
  const std::string base = base_params(cfg, {"r"});
  return {
      exact_bound_row(cfg.experiment, g->name(), base + " stat=exhaustive-sweep",
                      Rational(failures), "translation-failures", Rational(0)),
      exact_equality_row(cfg.experiment, g->name(), base + " q=2",
                         Rational(real_count, trials), "real-acceptance",
                         Rational(1)),
      mc_bound_row(cfg.experiment, g->name(), base + " q=2", est.p_ideal,
                   est.ci_halfwidth, "ideal-acceptance-cap",
                   2.0 / static_cast<double>(g->order())),
      info_row(cfg.experiment, g->name(),
               base + " q=2 stat=two-query-advantage"
                      " note=translation-structure-persists-at-any-round-count",
               format_decimal(est.advantage)),
  };
}

std::vector<ResultRow> run_rtilde_inconsistency(const ExperimentConfig& cfg) {
  const GroupRef half = Group::parse(cfg.group_spec);
  const std::uint64_t qc = cfg.budgets.at("q_c");
  const std::uint64_t n = half->order();
  if (qc > n * n)
    throw std::invalid_argument("more forward queries than distinct states");
  const std::uint64_t trials = *cfg.trials;
  RandomStream root(*cfg.seed, "rtilde-inconsistency");
  std::uint64_t bad = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomStream rt = root.fork(std::to_string(t));
    RTildeOracle oracle(half);
    for (std::uint64_t i = 0; i < qc; ++i) {
      const FeistelState x{half->element(i / n), half->element(i % n)};
      oracle.query(PsiDir::Forward, x, rt);
    }
    if (oracle.inconsistent()) ++bad;
  }
  const double rate = static_cast<double>(bad) / trials;
  const double pairs =
      qc < 2 ? 0.0 : 0.5 * static_cast<double>(qc) * (qc - 1);
  const double cap = pairs / (static_cast<double>(n) * n);
  const double hw = hoeffding_halfwidth(trials);
  const std::string base = base_params(cfg, {"q_c"});
  return {
      info_row(cfg.experiment, half->name(), base + " stat=inconsistency-rate",
               format_decimal(rate)),
      mc_bound_row(cfg.experiment, half->name(), base, rate, hw,
                   "pair-collision-cap", cap),
  };
}

// ---------------------------------------------------------------------------
// Registry.

struct ExperimentDef {
  ExperimentInfo info;
  std::string default_group;
  std::uint64_t default_trials;
  std::vector<std::pair<std::string, std::uint64_t>> default_budgets;
  std::vector<ResultRow> (*run)(const ExperimentConfig&);
};

const std::vector<ExperimentDef>& registry() {
  static const std::vector<ExperimentDef> defs = {
      {{"em-roundtrip", "one-key cipher: decrypt undoes encrypt, both ways",
        "--experiment em-roundtrip --group zmod:97 --trials 2000 --seed 11"},
       "zmod:97",
       10000,
       {},
       run_em_roundtrip},
      {{"em-multi-roundtrip", "iterated one-key cipher roundtrip, r rounds",
        "--experiment em-multi-roundtrip --group sym:5 --trials 1000 --r 3 "
        "--seed 12"},
       "zmod:97",
       5000,
       {{"r", 3}},
       run_em_multi_roundtrip},
      {{"feistel-roundtrip", "r-round network roundtrip on a square product",
        "--experiment feistel-roundtrip --group prod:zmod:97,zmod:97 "
        "--trials 1000 --r 8 --seed 13"},
       "prod:zmod:97,zmod:97",
       5000,
       {{"r", 8}},
       run_feistel_roundtrip},
      {{"psi-roundtrip", "whitened four-round construction roundtrip",
        "--experiment psi-roundtrip --group prod:bits:8,bits:8 --trials 1000 "
        "--seed 14"},
       "prod:zmod:97,zmod:97",
       5000,
       {},
       run_psi_roundtrip},
      {{"sc-roundtrip", "round-key shuffle inverse undoes the shuffle",
        "--experiment sc-roundtrip --group sym:5 --trials 1000 --r 16 "
        "--seed 15"},
       "zmod:97",
       5000,
       {{"r", 16}},
       run_sc_roundtrip},
      {{"sn-properties",
        "swap rounds: exhaustive bijectivity and round involution",
        "--experiment sn-properties --group zmod:52 --trials 50 --r 16 "
        "--seed 16"},
       "zmod:52",
       100,
       {{"r", 16}},
       run_sn_properties},
      {{"slide-attack",
        "key recovery rate for cross-index and same-index pair matching",
        "--experiment slide-attack --group zmod:1024 --d 32 --trials 500 "
        "--seed 17"},
       "zmod:1024",
       2000,
       {{"d", 32}},
       run_slide_attack},
      {{"feistel1-adv", "one-round leak: output left equals input right",
        "--experiment feistel1-adv --group prod:zmod:101,zmod:101 "
        "--trials 1000 --seed 18"},
       "prod:zmod:101,zmod:101",
       1000,
       {},
       run_feistel1_adv},
      {{"feistel2-adv", "two-round leak via a shared right half",
        "--experiment feistel2-adv --group prod:zmod:101,zmod:101 "
        "--trials 1000 --seed 19"},
       "prod:zmod:101,zmod:101",
       1000,
       {},
       run_feistel2_adv},
      {{"feistel3-sprp",
        "two-sided three-round attack: certain win vs the construction",
        "--experiment feistel3-sprp --group prod:zmod:101,zmod:101 "
        "--trials 2000 --seed 20"},
       "prod:zmod:101,zmod:101",
       10000,
       {},
       run_feistel3_sprp},
      {{"em-sprp-bound",
        "distinguisher catalog vs the one-key cipher under the 2st/n cap",
        "--experiment em-sprp-bound --group zmod:65536 --s 16 --t 16 --d 15 "
        "--trials 1000 --seed 21"},
       "zmod:65536",
       10000,
       {{"s", 16}, {"t", 16}, {"d", 15}},
       run_em_sprp_bound},
      {{"em-efp", "forgery game: random guess and slide-powered forger",
        "--experiment em-efp --group zmod:1024 --s 9 --t 12 --d 8 "
        "--trials 1000 --seed 22"},
       "zmod:1024",
       5000,
       {{"s", 9}, {"t", 12}, {"d", 8}},
       run_em_efp},
      {{"em-cp", "challenge inversion: random guess and slide-then-decrypt",
        "--experiment em-cp --group zmod:1024 --s 9 --t 12 --d 8 "
        "--trials 1000 --seed 23"},
       "zmod:1024",
       5000,
       {{"s", 9}, {"t", 12}, {"d", 8}},
       run_em_cp},
      {{"bad-keys",
        "exhaustive bad-key census against the 2st count and fraction caps",
        "--experiment bad-keys --group zmod:64 --trials 50 --seed 24"},
       "zmod:64",
       100,
       {},
       run_bad_keys},
      {{"psi-bad-events",
        "outer and middle collision frequencies on fixed transcripts",
        "--experiment psi-bad-events --group prod:zmod:16,zmod:16 --q_c 2 "
        "--q_f 2 --q_g 2 --trials 2000 --seed 25"},
       "prod:zmod:16,zmod:16",
       10000,
       {{"q_c", 2}, {"q_f", 2}, {"q_g", 2}},
       run_psi_bad_events},
      {{"psi-bound",
        "four-round construction vs both printed advantage bound variants",
        "--experiment psi-bound --group prod:zmod:256,zmod:256 --q_c 4 "
        "--q_f 2 --q_g 2 --trials 1000 --seed 26"},
       "prod:zmod:256,zmod:256",
       10000,
       {{"q_c", 4}, {"q_f", 2}, {"q_g", 2}},
       run_psi_bound},
      {{"game-equivalence",
        "exact transcript and flag laws across the oracle-game variants",
        "--experiment game-equivalence --group zmod:4 --seed 27"},
       "zmod:4",
       1,
       {},
       run_game_equivalence},
      {{"sc-mixing", "exact single-card distance vs the mixing bound",
        "--experiment sc-mixing --group zmod:8 --r 10 --seed 28"},
       "zmod:8",
       1,
       {{"r", 10}},
       run_mixing},
      {{"sn-mixing",
        "swap-round single-card distance (same transition operator)",
        "--experiment sn-mixing --group zmod:52 --r 24 --seed 29"},
       "zmod:52",
       1,
       {{"r", 24}},
       run_mixing},
      {{"sc-structure",
        "left-translation sweep plus the two-query distinguisher conflict",
        "--experiment sc-structure --group zmod:16 --r 16 --trials 300 "
        "--seed 30"},
       "zmod:16",
       1000,
       {{"r", 16}},
       run_sc_structure},
      {{"rtilde-inconsistency",
        "replay-oracle inconsistency rate vs the pair-collision cap",
        "--experiment rtilde-inconsistency --group zmod:4 --q_c 2 "
        "--trials 20000 --seed 31"},
       "zmod:4",
       100000,
       {{"q_c", 2}},
       run_rtilde_inconsistency},
  };
  return defs;
}

const ExperimentDef* find_def(const std::string& name) {
  for (const ExperimentDef& d : registry())
    if (d.info.name == name) return &d;
  return nullptr;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Info: return "INFO";
  }
  throw std::logic_error("unreachable verdict");
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "PASS") return Verdict::Pass;
  if (s == "FAIL") return Verdict::Fail;
  if (s == "INFO") return Verdict::Info;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

bool operator==(const ResultRow& a, const ResultRow& b) {
  return a.experiment == b.experiment && a.group == b.group &&
         a.params == b.params && a.measured == b.measured && a.ci == b.ci &&
         a.bound_name == b.bound_name && a.bound == b.bound &&
         a.verdict == b.verdict;
}

std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_rational(const Rational& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

ResultRow mc_bound_row(std::string experiment, std::string group,
                       std::string params, double measured, double ci,
                       std::string bound_name, double bound) {
  ResultRow r;
  r.experiment = std::move(experiment);
  r.group = std::move(group);
  r.params = std::move(params);
  r.measured = format_decimal(measured);
  r.ci = format_decimal(ci);
  r.bound_name = std::move(bound_name);
  r.bound = format_decimal(bound);
  r.verdict = measured <= bound + ci ? Verdict::Pass : Verdict::Fail;
  return r;
}

ResultRow exact_bound_row(std::string experiment, std::string group,
                          std::string params, const Rational& measured,
                          std::string bound_name, const Rational& bound) {
  ResultRow r;
  r.experiment = std::move(experiment);
  r.group = std::move(group);
  r.params = std::move(params);
  r.measured = format_rational(measured);
  r.bound_name = std::move(bound_name);
  r.bound = format_rational(bound);
  r.verdict = measured <= bound ? Verdict::Pass : Verdict::Fail;
  return r;
}

ResultRow exact_equality_row(std::string experiment, std::string group,
                             std::string params, const Rational& lhs,
                             std::string bound_name, const Rational& rhs) {
  ResultRow r;
  r.experiment = std::move(experiment);
  r.group = std::move(group);
  r.params = std::move(params);
  r.measured = format_rational(lhs);
  r.bound_name = std::move(bound_name);
  r.bound = format_rational(rhs);
  r.verdict = lhs == rhs ? Verdict::Pass : Verdict::Fail;
  return r;
}

ResultRow info_row(std::string experiment, std::string group,
                   std::string params, std::string measured) {
  ResultRow r;
  r.experiment = std::move(experiment);
  r.group = std::move(group);
  r.params = std::move(params);
  r.measured = std::move(measured);
  r.verdict = Verdict::Info;
  return r;
}

ExperimentConfig parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") +
                                e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config must be a flat json object");
  ExperimentConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const nlohmann::json& v = it.value();
    if (key == "experiment" || key == "group" || key == "output" ||
        key == "format") {
      if (!v.is_string())
        throw std::invalid_argument("config key '" + key +
                                    "' must be a string");
      const auto s = v.get<std::string>();
      if (key == "experiment") cfg.experiment = s;
      else if (key == "group") cfg.group_spec = s;
      else if (key == "output") cfg.output_path = s;
      else cfg.format = s;
    } else if (key == "trials" || key == "seed" || is_budget_key(key)) {
      if (!v.is_number_unsigned())
        throw std::invalid_argument("config key '" + key +
                                    "' must be a nonnegative integer");
      const auto n = v.get<std::uint64_t>();
      if (key == "trials") cfg.trials = n;
      else if (key == "seed") cfg.seed = n;
      else cfg.budgets[key] = n;
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "experiment") cfg.experiment = value;
  else if (key == "group") cfg.group_spec = value;
  else if (key == "output") cfg.output_path = value;
  else if (key == "format") cfg.format = value;
  else if (key == "trials") cfg.trials = parse_u64(key, value);
  else if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (is_budget_key(key)) cfg.budgets[key] = parse_u64(key, value);
  else throw std::invalid_argument("unknown flag '--" + key + "'");
}

void apply_flag_line(ExperimentConfig& cfg, const std::string& flags) {
  std::istringstream is(flags);
  std::string tok;
  while (is >> tok) {
    if (tok.rfind("--", 0) != 0)
      throw std::invalid_argument("expected a --flag, got '" + tok + "'");
    std::string value;
    if (!(is >> value))
      throw std::invalid_argument("flag '" + tok + "' needs a value");
    apply_override(cfg, tok.substr(2), value);
  }
}

void finalize_config(ExperimentConfig& cfg) {
  if (cfg.experiment.empty())
    throw std::invalid_argument("experiment name is required (see `list`)");
  const ExperimentDef* def = find_def(cfg.experiment);
  if (!def)
    throw std::invalid_argument("unknown experiment '" + cfg.experiment +
                                "' (see `list`)");
  if (!cfg.seed)
    throw std::invalid_argument(
        "seed is required; pass --seed (it is never read from the "
        "environment)");
  if (cfg.group_spec.empty()) cfg.group_spec = def->default_group;
  if (!cfg.trials) cfg.trials = def->default_trials;
  if (*cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  for (const auto& [key, value] : def->default_budgets)
    if (cfg.budgets.find(key) == cfg.budgets.end()) cfg.budgets[key] = value;
  for (const auto& [key, value] : cfg.budgets) {
    (void)value;
    const bool used =
        std::any_of(def->default_budgets.begin(), def->default_budgets.end(),
                    [&key](const auto& kv) { return kv.first == key; });
    if (!used)
      throw std::invalid_argument("budget '" + key +
                                  "' is not used by experiment '" +
                                  cfg.experiment + "'");
  }
  if (cfg.format != "csv" && cfg.format != "json")
    throw std::invalid_argument("format must be csv or json, got '" +
                                cfg.format + "'");
  Group::parse(cfg.group_spec);
}

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> out;
    for (const ExperimentDef& d : registry()) out.push_back(d.info);
    return out;
  }();
  return infos;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  finalize_config(cfg);
  const ExperimentDef* def = find_def(cfg.experiment);
  try {
    return def->run(cfg);
  } catch (const std::exception& e) {
    throw std::runtime_error("experiment '" + cfg.experiment +
                             "': " + e.what());
  }
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "experiment,group,params,measured,ci,bound_name,bound,verdict\n";
  for (const ResultRow& r : rows) {
    out += csv_escape(r.experiment) + ',' + csv_escape(r.group) + ',' +
           csv_escape(r.params) + ',' + csv_escape(r.measured) + ',' +
           csv_escape(r.ci) + ',' + csv_escape(r.bound_name) + ',' +
           csv_escape(r.bound) + ',' + to_string(r.verdict) + '\n';
  }
  return out;
}

std::string to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRow& r : rows)
    arr.push_back({{"experiment", r.experiment},
                   {"group", r.group},
                   {"params", r.params},
                   {"measured", r.measured},
                   {"ci", r.ci},
                   {"bound_name", r.bound_name},
                   {"bound", r.bound},
                   {"verdict", to_string(r.verdict)}});
  return arr.dump(2) + "\n";
}

std::vector<ResultRow> rows_from_json(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("result parse error: ") +
                                e.what());
  }
  if (!parsed.is_array())
    throw std::invalid_argument("result json must be an array of rows");
  std::vector<ResultRow> rows;
  for (const nlohmann::json& j : parsed) {
    ResultRow r;
    r.experiment = j.at("experiment").get<std::string>();
    r.group = j.at("group").get<std::string>();
    r.params = j.at("params").get<std::string>();
    r.measured = j.at("measured").get<std::string>();
    r.ci = j.at("ci").get<std::string>();
    r.bound_name = j.at("bound_name").get<std::string>();
    r.bound = j.at("bound").get<std::string>();
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string to_table(const std::vector<ResultRow>& rows) {
  const std::array<std::string, 8> header = {"experiment", "group",  "params",
                                             "measured",   "ci",     "bound_name",
                                             "bound",      "verdict"};
  std::vector<std::array<std::string, 8>> cells;
  for (const ResultRow& r : rows)
    cells.push_back({r.experiment, r.group, r.params, r.measured, r.ci,
                     r.bound_name, r.bound, to_string(r.verdict)});
  std::array<std::size_t, 8> width{};
  for (std::size_t c = 0; c < 8; ++c) width[c] = header[c].size();
  for (const auto& row : cells)
    for (std::size_t c = 0; c < 8; ++c)
      width[c] = std::max(width[c], row[c].size());
  std::string out;
  const auto emit_line = [&](const std::array<std::string, 8>& row) {
    for (std::size_t c = 0; c < 8; ++c) {
      out += row[c];
      if (c + 1 < 8) out += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out += '\n';
  };
  emit_line(header);
  std::array<std::string, 8> rule;
  for (std::size_t c = 0; c < 8; ++c) rule[c] = std::string(width[c], '-');
  emit_line(rule);
  for (const auto& row : cells) emit_line(row);
  std::size_t pass = 0, fail = 0, info = 0;
  for (const ResultRow& r : rows) {
    if (r.verdict == Verdict::Pass) ++pass;
    else if (r.verdict == Verdict::Fail) ++fail;
    else ++info;
  }
  out += "\nPASS " + std::to_string(pass) + "  FAIL " + std::to_string(fail) +
         "  INFO " + std::to_string(info) + "\n";
  return out;
}

void emit(const std::vector<ResultRow>& rows, const std::string& format,
          const std::string& path) {
  std::string payload;
  if (format == "csv") payload = to_csv(rows);
  else if (format == "json") payload = to_json(rows);
  else
    throw std::invalid_argument("format must be csv or json, got '" + format +
                                "'");
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << payload;
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace gclab
