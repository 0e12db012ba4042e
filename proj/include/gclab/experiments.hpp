#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gclab/shuffles.hpp"

namespace gclab {

enum class Verdict { Pass, Fail, Info };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// One emitted measurement: a value, optionally a bound to compare it
/// against, and the comparison outcome.  Numeric fields are preformatted
/// strings so CSV and JSON emissions round-trip losslessly.
struct ResultRow {
  std::string experiment;
  std::string group;
  std::string params;
  std::string measured;
  std::string ci;          // empty on exact and info rows
  std::string bound_name;  // empty on info rows
  std::string bound;       // empty on info rows
  Verdict verdict = Verdict::Info;
};

bool operator==(const ResultRow& a, const ResultRow& b);
inline bool operator!=(const ResultRow& a, const ResultRow& b) {
  return !(a == b);
}

/// Decimals carry six significant digits; rationals print canonically,
/// "p/q" with the denominator omitted when it is one.
std::string format_decimal(double v);
std::string format_rational(const Rational& v);

/// Statistical bound check: PASS iff measured <= bound + ci.
ResultRow mc_bound_row(std::string experiment, std::string group,
                       std::string params, double measured, double ci,
                       std::string bound_name, double bound);
/// Exact bound check with no statistical slack: PASS iff measured <= bound.
ResultRow exact_bound_row(std::string experiment, std::string group,
                          std::string params, const Rational& measured,
                          std::string bound_name, const Rational& bound);
/// Exact equality claim: PASS iff lhs == rhs literally.
ResultRow exact_equality_row(std::string experiment, std::string group,
                             std::string params, const Rational& lhs,
                             std::string bound_name, const Rational& rhs);
/// Reported value without a bound; bound fields stay empty.
ResultRow info_row(std::string experiment, std::string group,
                   std::string params, std::string measured);

/// Flat experiment configuration.  A config file is a flat JSON object
/// holding the same keys the run flags use; flags override file values.
/// The seed is never defaulted (and never read from the environment), so
/// every emitted row is reproducible from its inputs alone.
struct ExperimentConfig {
  std::string experiment;
  std::string group_spec;                        // empty: experiment default
  std::optional<std::uint64_t> trials;           // absent: experiment default
  std::optional<std::uint64_t> seed;             // required
  std::map<std::string, std::uint64_t> budgets;  // d,s,t,q_c,q_f,q_g,r,q
  std::string output_path;                       // empty: stdout
  std::string format = "csv";
};

/// Parses a flat JSON object; unknown keys and wrong types are rejected
/// with the offending key named.
ExperimentConfig parse_config_json(const std::string& text);

/// Applies one flag-style override; unknown keys are rejected by name.
void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

/// Applies a "--key value ..." line, e.g. a catalog entry's smoke flags.
void apply_flag_line(ExperimentConfig& cfg, const std::string& flags);

/// Fills experiment defaults and checks invariants; throws naming the
/// offending field.  Budgets an experiment does not use are rejected.
void finalize_config(ExperimentConfig& cfg);

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::string smoke_flags;  // documented config, runs in well under a minute
};

/// Every runnable experiment, in stable listing order.
const std::vector<ExperimentInfo>& experiment_catalog();

/// Runs one experiment.  The row list is a pure function of the finalized
/// config; reruns with the same config emit byte-identical output.  Errors
/// out of an experiment body carry the experiment name as context.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// Header `experiment,group,params,measured,ci,bound_name,bound,verdict`
/// followed by one line per row, RFC-style quoting where needed.
std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_json(const std::string& text);
/// Aligned comparison table with a PASS/FAIL/INFO tally line at the end.
std::string to_table(const std::vector<ResultRow>& rows);

/// Writes rows in `format` ("csv" or "json") to `path`, or to stdout when
/// the path is empty.
void emit(const std::vector<ResultRow>& rows, const std::string& format,
          const std::string& path);

}  // namespace gclab
