// Command-line front end for the experiment registry: `list` shows every
// experiment with a smoke config, `run` executes one deterministically,
// `table` renders saved JSON results for reading.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gclab/experiments.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

constexpr const char* kRunKeys[] = {"experiment", "group", "trials", "seed",
                                    "d",          "s",     "t",      "q_c",
                                    "q_f",        "q_g",   "r",      "q",
                                    "output",     "format"};

int do_list() {
  for (const gclab::ExperimentInfo& info : gclab::experiment_catalog()) {
    std::cout << info.name << "\n  " << info.summary << "\n  smoke: run "
              << info.smoke_flags << "\n";
  }
  return 0;
}

int do_run(const std::string& config_path,
           const std::map<std::string, std::string>& values,
           const std::map<std::string, CLI::Option*>& opts) {
  gclab::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = gclab::parse_config_json(slurp(config_path));
  for (const char* key : kRunKeys)
    if (opts.at(key)->count() > 0)
      gclab::apply_override(cfg, key, values.at(key));
  const std::vector<gclab::ResultRow> rows = gclab::run_experiment(cfg);
  gclab::emit(rows, cfg.format, cfg.output_path);
  for (const gclab::ResultRow& r : rows)
    if (r.verdict == gclab::Verdict::Fail) return 2;
  return 0;
}

int do_table(const std::vector<std::string>& files,
             const std::string& out_path) {
  std::vector<gclab::ResultRow> rows;
  for (const std::string& f : files) {
    const std::vector<gclab::ResultRow> part =
        gclab::rows_from_json(slurp(f));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const std::string rendered = gclab::to_table(rows);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot open '" + out_path + "' for writing");
    out << rendered;
  }
  for (const gclab::ResultRow& r : rows)
    if (r.verdict == gclab::Verdict::Fail) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-cipher laboratory experiment runner"};
  app.require_subcommand(1);

  CLI::App* list_cmd =
      app.add_subcommand("list", "show every experiment and a smoke config");

  CLI::App* run_cmd = app.add_subcommand(
      "run", "run one experiment; flags override --config file values");
  std::string config_path;
  run_cmd->add_option("--config", config_path,
                      "flat json config file (flags take precedence)");
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;
  for (const char* key : kRunKeys)
    opts[key] = run_cmd->add_option("--" + std::string(key), values[key]);

  CLI::App* table_cmd =
      app.add_subcommand("table", "render saved json result files");
  std::vector<std::string> table_files;
  table_cmd->add_option("files", table_files, "json result files")
      ->required();
  std::string table_out;
  table_cmd->add_option("--output", table_out,
                        "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (list_cmd->parsed()) return do_list();
    if (run_cmd->parsed()) return do_run(config_path, values, opts);
    return do_table(table_files, table_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
