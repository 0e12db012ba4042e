// Acceptance gate: one line per criterion, spec-level sizes and tolerances.
// Exit status 0 iff every line reads PASS.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gclab/attacks.hpp"
#include "gclab/experiments.hpp"
#include "gclab/group.hpp"
#include "gclab/shuffles.hpp"

using namespace gclab;

namespace {

constexpr std::uint64_t kSeed = 2026;

struct Gate {
  std::string label;
  bool ok = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

/// Runs one experiment config under the shared acceptance seed and folds
/// its verdicts into the gate: any FAIL row flips the gate to failed.
std::vector<ResultRow> run_cfg(Gate& gate, const std::string& experiment,
                               const std::string& group, std::uint64_t trials,
                               std::map<std::string, std::uint64_t> budgets) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.group_spec = group;
  cfg.trials = trials;
  cfg.seed = kSeed;
  cfg.budgets = std::move(budgets);
  const std::vector<ResultRow> rows = run_experiment(cfg);
  for (const ResultRow& r : rows) {
    if (r.verdict == Verdict::Fail) {
      gate.ok = false;
      gate.detail += " FAIL[" + r.group + " " + r.bound_name + " measured=" +
                     r.measured + " bound=" + r.bound + "]";
    }
  }
  return rows;
}

Gate criterion_roundtrips() {
  Gate gate{"correctness roundtrips, 10^4 cases per cipher and group", true,
            ""};
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> plain = {"zmod:97", "bits:8", "sym:5",
                                          "prod:zmod:97,zmod:97"};
  const std::vector<std::string> pairs = {"prod:zmod:97,zmod:97",
                                          "prod:bits:8,bits:8",
                                          "prod:sym:5,sym:5"};
  std::size_t runs = 0;
  for (const std::string& g : plain) {
    run_cfg(gate, "em-roundtrip", g, 10000, {});
    run_cfg(gate, "em-multi-roundtrip", g, 10000, {{"r", 3}});
    run_cfg(gate, "sc-roundtrip", g, 10000, {{"r", 16}});
    runs += 3;
  }
  for (const std::string& g : pairs) {
    run_cfg(gate, "feistel-roundtrip", g, 10000, {{"r", 8}});
    run_cfg(gate, "psi-roundtrip", g, 10000, {});
    runs += 2;
  }
  const double secs = seconds_since(t0);
  if (secs >= 60.0) {
    gate.ok = false;
    gate.detail += " FAIL[over the 60 s budget]";
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu runs, %.1fs", runs, secs);
  gate.detail = buf + gate.detail;
  return gate;
}

Gate criterion_three_round_attack() {
  Gate gate{"three-round attack certain vs the network, rare vs random", true,
            ""};
  for (const std::string& g :
       {std::string("prod:zmod:101,zmod:101"), std::string("prod:sym:4,sym:4")}) {
    const std::vector<ResultRow> rows =
        run_cfg(gate, "feistel3-sprp", g, 10000, {});
    for (const ResultRow& r : rows) {
      if (r.bound_name == "real-acceptance" && r.measured != "1") {
        gate.ok = false;
        gate.detail += " FAIL[" + g + " real acceptance " + r.measured + "]";
      }
    }
  }
  if (gate.ok) gate.detail = "acceptance 1 exactly; ideal within 3/|half|";
  return gate;
}

Gate criterion_low_round_leaks() {
  Gate gate{"one- and two-round leaks give advantage >= 0.95", true, ""};
  const std::uint64_t trials = 1000;
  struct Probe {
    const char* name;
    std::uint64_t rounds;
    Distinguisher dist;
  };
  const Probe probes[] = {
      {"one-round", 1, feistel1_distinguisher},
      {"two-round", 2, feistel2_distinguisher},
  };
  std::string detail;
  for (const std::string& spec :
       {std::string("prod:zmod:101,zmod:101"), std::string("prod:sym:4,sym:4")}) {
    const GroupRef gp = Group::parse(spec);
    for (const Probe& p : probes) {
      RandomStream rng(kSeed, std::string("low-round/") + p.name + "/" + spec);
      const AdvantageEstimate est =
          run_distinguisher_game(make_feistel_world(gp, p.rounds),
                                 make_ideal_world(gp), p.dist, trials, rng);
      char buf[80];
      std::snprintf(buf, sizeof buf, " %s@%s=%.3f", p.name, spec.c_str(),
                    est.advantage);
      detail += buf;
      if (!(est.advantage >= 0.95)) {
        gate.ok = false;
        detail += "(FAIL)";
      }
    }
  }
  gate.detail = detail.substr(1);
  return gate;
}

Gate criterion_slide_rates() {
  Gate gate{"slide key recovery at the birthday rate", true, ""};
  const std::vector<ResultRow> rows =
      run_cfg(gate, "slide-attack", "zmod:1024", 2000, {{"d", 32}});
  for (const ResultRow& r : rows)
    if (r.verdict == Verdict::Info) gate.detail += " " + r.params;
  if (gate.ok)
    gate.detail = "cross within 0.07 of 0.632; same-index within ci of 1/32";
  return gate;
}

Gate criterion_sprp_cap() {
  Gate gate{"every distinguisher stays under 2st/|G| + ci", true, ""};
  run_cfg(gate, "em-sprp-bound", "zmod:65536", 10000,
          {{"s", 16}, {"t", 16}, {"d", 15}});
  if (gate.ok) gate.detail = "4 distinguishers, cap 0.0078125, 10^4 trials";
  return gate;
}

Gate criterion_bad_key_census() {
  Gate gate{"bad keys: count <= 2st and fraction <= 2st/|G|, exhaustive",
            true, ""};
  std::size_t rows = 0;
  for (const std::string& g : {std::string("zmod:5"), std::string("zmod:16"),
                               std::string("zmod:37"), std::string("zmod:64")})
    rows += run_cfg(gate, "bad-keys", g, 100, {}).size();
  if (gate.ok)
    gate.detail = std::to_string(rows) + " caps over (s,t) in {1,2,4}^2 x 4 groups";
  return gate;
}

Gate criterion_collision_frequencies() {
  Gate gate{"outer/middle collision frequencies under their caps", true, ""};
  run_cfg(gate, "psi-bad-events", "prod:zmod:16,zmod:16", 10000,
          {{"q_c", 2}, {"q_f", 2}, {"q_g", 2}});
  run_cfg(gate, "psi-bad-events", "prod:zmod:16,zmod:16", 10000,
          {{"q_c", 4}, {"q_f", 1}, {"q_g", 1}});
  if (gate.ok) gate.detail = "20 transcripts x 2 budget mixes, 10^4 draws each";
  return gate;
}

Gate criterion_psi_bound() {
  Gate gate{"four-round advantage under both printed bound variants", true,
            ""};
  const std::vector<ResultRow> rows =
      run_cfg(gate, "psi-bound", "prod:zmod:256,zmod:256", 10000,
              {{"q_c", 4}, {"q_f", 2}, {"q_g", 2}});
  std::size_t stated = 0, accumulated = 0;
  for (const ResultRow& r : rows) {
    if (r.bound_name == "stated-bound") ++stated;
    if (r.bound_name == "accumulated-bound") ++accumulated;
  }
  if (stated == 0 || accumulated == 0) {
    gate.ok = false;
    gate.detail += " FAIL[missing a bound variant]";
  }
  if (gate.ok) gate.detail = "both variants reported side by side, 10^4 trials";
  return gate;
}

Gate criterion_game_equivalences() {
  Gate gate{"exact game equivalences over the script catalog", true, ""};
  std::size_t rows = 0;
  for (const std::string& g : {std::string("zmod:3"), std::string("zmod:4"),
                               std::string("zmod:5")})
    rows += run_cfg(gate, "game-equivalence", g, 1, {}).size();
  if (gate.ok)
    gate.detail = std::to_string(rows) + " exact rational identities";
  return gate;
}

Gate criterion_sc_mixing() {
  Gate gate{"single-card law: brute force, closed form, mixing bound", true,
            ""};
  // Exhaustive check: every (key, bit) sequence, each weight 1/(2N)^r.
  for (std::uint64_t n = 2; n <= 8; ++n) {
    const GroupRef g = Group::parse("zmod:" + std::to_string(n));
    const std::vector<Element> all = g->enumerate();
    for (std::size_t r = 1; r <= 6; ++r) {
      std::vector<std::uint64_t> counts(n, 0);
      std::function<void(std::size_t, const Element&)> walk =
          [&](std::size_t depth, const Element& cur) {
            if (depth == r) {
              ++counts[cur.index];
              return;
            }
            for (const Element& k : all) {
              walk(depth + 1, cur);
              walk(depth + 1, g->op(k, cur));
            }
          };
      walk(0, g->identity());
      std::uint64_t total = 1;
      for (std::size_t i = 0; i < r; ++i) total *= 2 * n;
      const Distribution dist = single_card_distribution(g, r, g->identity());
      for (std::uint64_t i = 0; i < n; ++i) {
        if (dist.probs[i] != Rational(counts[i], total)) {
          gate.ok = false;
          gate.detail += " FAIL[operator vs brute force at n=" +
                         std::to_string(n) + " r=" + std::to_string(r) + "]";
        }
      }
      const Rational tvd = total_variation(dist, uniform_distribution(g));
      using boost::multiprecision::cpp_int;
      if (tvd != Rational(cpp_int(n - 1), cpp_int(n) << r)) {
        gate.ok = false;
        gate.detail += " FAIL[closed form at n=" + std::to_string(n) +
                       " r=" + std::to_string(r) + "]";
      }
    }
  }
  for (std::uint64_t n : {4, 8, 16, 101}) {
    const GroupRef g = Group::parse("zmod:" + std::to_string(n));
    for (std::size_t r = 1; r <= 64; ++r) {
      const Rational tvd = total_variation(
          single_card_distribution(g, r, g->identity()),
          uniform_distribution(g));
      if (!(tvd.convert_to<double>() <=
            thm62_bound(static_cast<double>(n), 1.0,
                        static_cast<double>(r)))) {
        gate.ok = false;
        gate.detail += " FAIL[mixing bound at n=" + std::to_string(n) +
                       " r=" + std::to_string(r) + "]";
      }
    }
  }
  if (gate.ok)
    gate.detail =
        "all (2|G|)^r sequences for |G|<=8, r<=6; bound holds to r=64";
  return gate;
}

Gate criterion_sc_translation() {
  Gate gate{"round-key shuffle is a left translation; two queries expose it",
            true, ""};
  bool saw_info = false;
  for (const std::string& g :
       {std::string("zmod:24"), std::string("sym:4")}) {
    for (std::uint64_t r : {4, 16, 64}) {
      const std::vector<ResultRow> rows =
          run_cfg(gate, "sc-structure", g, 200, {{"r", r}});
      for (const ResultRow& row : rows)
        if (row.verdict == Verdict::Info) saw_info = true;
    }
  }
  if (!saw_info) {
    gate.ok = false;
    gate.detail += " FAIL[missing the two-query advantage note]";
  }
  if (gate.ok)
    gate.detail =
        "exhaustive on |G|=24 at r in {4,16,64}; conflict noted as INFO";
  return gate;
}

Gate criterion_sn_shuffle() {
  Gate gate{"swap rounds: bijective, involutive, and mixing-bounded", true,
            ""};
  for (const std::string& g : {std::string("zmod:10"), std::string("zmod:52"),
                               std::string("zmod:64")})
    run_cfg(gate, "sn-properties", g, 100, {{"r", 16}});
  for (std::uint64_t n : {10, 52, 64}) {
    const GroupRef g = Group::parse("zmod:" + std::to_string(n));
    for (std::size_t r = 1; r <= 64; ++r) {
      const Rational tvd = total_variation(
          single_card_distribution(g, r, g->identity()),
          uniform_distribution(g));
      if (!(tvd.convert_to<double>() <=
            thm62_bound(static_cast<double>(n), 1.0,
                        static_cast<double>(r)))) {
        gate.ok = false;
        gate.detail += " FAIL[mixing bound at n=" + std::to_string(n) +
                       " r=" + std::to_string(r) + "]";
      }
    }
  }
  if (gate.ok)
    gate.detail = "100 draws x 3 sizes exhaustive; bound holds to r=64";
  return gate;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Gate (*)()> criteria = {
      criterion_roundtrips,       criterion_three_round_attack,
      criterion_low_round_leaks,  criterion_slide_rates,
      criterion_sprp_cap,         criterion_bad_key_census,
      criterion_collision_frequencies, criterion_psi_bound,
      criterion_game_equivalences, criterion_sc_mixing,
      criterion_sc_translation,   criterion_sn_shuffle,
  };
  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const Gate g = criteria[i]();
    std::printf("[%2zu] %s  %s (%s) [%.1fs]\n", i + 1, g.ok ? "PASS" : "FAIL",
                g.label.c_str(), g.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    all_ok = all_ok && g.ok;
  }
  std::printf("%s in %.1fs\n", all_ok ? "ALL CRITERIA PASS" : "FAILURES ABOVE",
              seconds_since(start));
  return all_ok ? 0 : 1;
}
