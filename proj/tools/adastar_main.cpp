// Experiment runner: single runs, seed-sweep ablation matrices, and synthetic
// corpus generation.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "adastar/artifacts.hpp"
#include "adastar/config.hpp"
#include "adastar/corpus.hpp"
#include "adastar/engine.hpp"
#include "adastar/remote.hpp"
#include "adastar/rng.hpp"
#include "adastar/synthetic.hpp"

namespace {

using namespace adastar;

constexpr int kExitOk = 0;
constexpr int kExitLearnerFatal = 1;
constexpr int kExitUsage = 2;

struct RunOutput {
  MetricsLedger ledger;
  bool fatal = false;
  std::string error;
};

std::unique_ptr<LearnerBackend> make_learner(const RunConfig& config, const Corpus& full,
                                             const Corpus& train) {
  if (config.learner == "synthetic") {
    return std::make_unique<SyntheticLearner>(config.synth, full, train.size(), config.seed);
  }
  std::string url = config.remote_url;
  if (url.empty()) {
    if (const char* env = std::getenv("ADASTAR_REMOTE_URL")) url = env;
  }
  if (url.empty()) {
    throw ConfigError("remote learner selected but no remote_url (or ADASTAR_REMOTE_URL) given");
  }
  // full corpus: evaluation must resolve holdout ids too
  return std::make_unique<RemoteLearner>(url, full, std::vector<Exemplar>{});
}

RunOutput execute_run(const RunConfig& config) {
  const Corpus full = load_corpus(config.corpus_path, config.corpus_limit);
  const auto [train, holdout] = split_holdout(full, config.holdout_fraction, config.seed);
  const auto learner = make_learner(config, full, train);

  Experiment experiment(config.resolve_setup(), train, holdout, *learner);
  experiment.run();

  RunOutput out;
  out.ledger = experiment.ledger();
  if (experiment.fatal_error()) {
    out.fatal = true;
    out.error = *experiment.fatal_error();
  }
  return out;
}

int cmd_run(const RunConfig& config) {
  if (config.corpus_path.empty()) {
    std::cerr << "error: no corpus file given\n";
    return kExitUsage;
  }
  if (!std::filesystem::exists(config.corpus_path)) {
    std::cerr << "error: corpus file not found: " << config.corpus_path << "\n";
    return kExitUsage;
  }
  if (config.output_dir.empty()) {
    std::cerr << "error: no output directory given\n";
    return kExitUsage;
  }
  config.resolve_setup();  // fail fast on bad policy knobs

  RunOutput out = execute_run(config);

  std::filesystem::create_directories(config.output_dir);
  save_config(config, std::filesystem::path(config.output_dir) / "config.json");
  if (!out.ledger.iterations.empty()) {
    write_run_artifacts(out.ledger, config.output_dir, config.variant, config.seed);
  }
  if (out.fatal) {
    std::cerr << "fatal learner error: " << out.error << "\n";
    return kExitLearnerFatal;
  }
  std::cout << "run complete: " << out.ledger.iterations.size() << " iterations, best acc "
            << format_double(out.ledger.best_accuracy) << " at iteration "
            << out.ledger.best_iteration << "\n";
  return kExitOk;
}

struct MatrixCell {
  std::string name;
  RunConfig config;
  bool ok = false;
  std::string error;
  MetricsLedger ledger;
};

int cmd_matrix(const std::filesystem::path& matrix_path, const std::string& output_dir,
               int jobs) {
  std::ifstream in(matrix_path);
  if (!in) {
    std::cerr << "error: cannot open matrix file: " << matrix_path << "\n";
    return kExitUsage;
  }
  nlohmann::json spec = nlohmann::json::parse(in, nullptr, false);
  if (spec.is_discarded() || !spec.is_object() || !spec.contains("variants") ||
      !spec.contains("seeds")) {
    std::cerr << "error: matrix file needs `variants` and `seeds` arrays\n";
    return kExitUsage;
  }

  const RunConfig base =
      spec.contains("base") ? config_from_json(spec["base"]) : RunConfig{};
  Iter sd_a = 1, sd_b = 10;
  if (spec.contains("sd_window")) {
    sd_a = spec["sd_window"][0].get<Iter>();
    sd_b = spec["sd_window"][1].get<Iter>();
  }

  std::vector<MatrixCell> cells;
  for (const auto& variant : spec["variants"]) {
    for (const auto& seed : spec["seeds"]) {
      MatrixCell cell;
      nlohmann::json merged = config_to_json(base);
      merged.update(variant);
      cell.config = config_from_json(merged);
      cell.config.seed = seed.get<std::uint64_t>();
      cell.name = variant.contains("name") ? variant["name"].get<std::string>()
                                           : cell.config.variant;
      cell.config.output_dir =
          output_dir + "/" + cell.name + "-seed" + std::to_string(cell.config.seed);
      cells.push_back(std::move(cell));
    }
  }
  if (cells.empty()) {
    std::cerr << "error: empty matrix\n";
    return kExitUsage;
  }

  // independent runs; safe to parallelize for the synthetic backend
  const bool parallel = base.learner == "synthetic" && jobs != 1;
  const auto n = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    MatrixCell& cell = cells[static_cast<std::size_t>(i)];
    try {
      RunOutput out = execute_run(cell.config);
      if (out.fatal) {
        cell.error = out.error;
      } else {
        cell.ledger = std::move(out.ledger);
        cell.ok = true;
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  }

  std::filesystem::create_directories(output_dir);
  for (const auto& cell : cells) {
    if (!cell.ok) continue;
    std::filesystem::create_directories(cell.config.output_dir);
    save_config(cell.config, std::filesystem::path(cell.config.output_dir) / "config.json");
    write_run_artifacts(cell.ledger, cell.config.output_dir, cell.name, cell.config.seed);
  }

  std::ofstream csv(output_dir + "/matrix.csv");
  csv << "kind,name,seed,status,best_iteration,best_accuracy,cumulative_pflops,sd_" << sd_a
      << "_" << sd_b << "\n";
  std::map<std::string, std::vector<const MatrixCell*>> by_name;
  for (const auto& cell : cells) {
    csv << "run," << cell.name << ',' << cell.config.seed << ','
        << (cell.ok ? "ok" : "failed") << ',';
    if (cell.ok) {
      const Iter last = cell.ledger.iterations.back().t;
      const double sd =
          last >= sd_b ? freq_sd(trained_freq(cell.ledger, sd_a, sd_b)) : std::nan("");
      csv << cell.ledger.best_iteration << ',' << format_double(cell.ledger.best_accuracy)
          << ',' << format_double(cell.ledger.flops.cumulative() / 1e15) << ','
          << format_double(sd) << '\n';
    } else {
      csv << ",,,\n";
    }
    by_name[cell.name].push_back(&cell);
  }

  bool any_ok = false;
  for (const auto& [name, group] : by_name) {
    double acc = 0.0, sd = 0.0, pflops = 0.0;
    long n_ok = 0;
    for (const auto* cell : group) {
      if (!cell->ok) continue;
      ++n_ok;
      acc += cell->ledger.best_accuracy;
      pflops += cell->ledger.flops.cumulative() / 1e15;
      const Iter last = cell->ledger.iterations.back().t;
      sd += last >= sd_b ? freq_sd(trained_freq(cell->ledger, sd_a, sd_b)) : 0.0;
    }
    if (n_ok == 0) {
      csv << "aggregate," << name << ",,failed,,,,\n";
      continue;
    }
    any_ok = true;
    csv << "aggregate," << name << ",,ok,," << format_double(acc / n_ok) << ','
        << format_double(pflops / n_ok) << ',' << format_double(sd / n_ok) << '\n';
  }

  std::cout << "matrix complete: " << cells.size() << " runs -> " << output_dir
            << "/matrix.csv\n";
  return any_ok ? kExitOk : kExitLearnerFatal;
}

int cmd_make_synth(const std::string& out_path, long n, const std::string& shape, double mean,
                   double stddev, double mean2, double low, double high, std::uint64_t seed,
                   bool echo_answer) {
  DifficultySpec spec;
  if (shape == "normal") {
    spec.shape = DifficultySpec::Shape::Normal;
  } else if (shape == "bimodal") {
    spec.shape = DifficultySpec::Shape::Bimodal;
  } else if (shape == "uniform") {
    spec.shape = DifficultySpec::Shape::Uniform;
  } else {
    std::cerr << "error: unknown difficulty shape: " << shape << "\n";
    return kExitUsage;
  }
  spec.mean = mean;
  spec.stddev = stddev;
  spec.mean2 = mean2;
  spec.low = low;
  spec.high = high;
  try {
    save_corpus(make_synthetic_corpus(n, spec, seed, echo_answer), out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cout << "wrote " << n << " observations to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive observation-sampling loops for self-taught reasoner training"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "execute one experiment and export metrics");
  std::string run_config_path;
  RunConfig flags;
  bool flag_acc = false, flag_no_acc = false, flag_full = false, flag_rat = false,
       flag_no_rat = false;
  std::optional<int> flag_k, flag_cutoff, flag_max_iters, flag_sigma1;
  std::optional<std::uint64_t> flag_seed;
  std::optional<std::string> flag_variant, flag_learner, flag_remote_url, flag_corpus,
      flag_output, flag_alpha_source;
  std::optional<double> flag_holdout;

  run->add_option("--config", run_config_path, "JSON config file (flags override it)");
  run->add_option("--corpus", flag_corpus, "corpus file (line-delimited JSON)");
  run->add_option("--output", flag_output, "output directory for artifacts");
  run->add_option("--variant", flag_variant,
                  "policy preset: adastar|adad|wo-win|pf|star|star-acc|star-full|"
                  "star-acc-full|star-acc-full-k|restem");
  run->add_flag("--accumulate", flag_acc, "fine-tune from the previous iteration's model");
  run->add_flag("--reset", flag_no_acc, "retrain from the base model every iteration");
  run->add_flag("--full-batch", flag_full, "train on all accepted samples");
  run->add_option("-K,--samples", flag_k, "CoT samples per observation");
  run->add_flag("--rationalize", flag_rat, "retry failures with the gold answer as hint");
  run->add_flag("--no-rationalize", flag_no_rat, "disable rationalization");
  run->add_option("--cutoff", flag_cutoff, "per-observation accepted-sample cap");
  run->add_option("--seed", flag_seed, "run seed");
  run->add_option("--max-iters", flag_max_iters, "iteration budget");
  run->add_option("--sigma1", flag_sigma1, "gradient steps in iteration 1");
  run->add_option("--learner", flag_learner, "synthetic|remote");
  run->add_option("--remote-url", flag_remote_url, "inference server base URL");
  run->add_option("--holdout", flag_holdout, "held-out evaluation fraction");
  run->add_option("--alpha-source", flag_alpha_source, "sampling|reported");

  // --- matrix ---
  auto* matrix = app.add_subcommand("matrix", "run a variants x seeds sweep and aggregate");
  std::string matrix_path, matrix_output;
  int matrix_jobs = 0;
  matrix->add_option("--config", matrix_path, "matrix JSON: base, variants[], seeds[]")
      ->required();
  matrix->add_option("--output", matrix_output, "output directory")->required();
  matrix->add_option("--jobs", matrix_jobs, "1 forces serial execution");

  // --- make-synth ---
  auto* synth = app.add_subcommand("make-synth", "generate a synthetic corpus");
  std::string synth_out = "corpus.jsonl", synth_shape = "normal";
  long synth_n = 500;
  double synth_mean = 0.0, synth_stddev = 1.0, synth_mean2 = 0.0, synth_low = -2.0,
         synth_high = 2.0;
  std::uint64_t synth_seed = 10;
  bool synth_echo = false;
  synth->add_option("--output", synth_out, "corpus file to write");
  synth->add_option("--n", synth_n, "number of observations");
  synth->add_option("--difficulty", synth_shape, "normal|bimodal|uniform");
  synth->add_option("--mean", synth_mean, "normal mean / first bimodal mode");
  synth->add_option("--stddev", synth_stddev, "normal / per-mode standard deviation");
  synth->add_option("--mean2", synth_mean2, "second bimodal mode");
  synth->add_option("--low", synth_low, "uniform lower bound");
  synth->add_option("--high", synth_high, "uniform upper bound");
  synth->add_option("--seed", synth_seed, "generation seed");
  synth->add_flag("--echo-answer", synth_echo, "embed the answer as the question's last token");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) {
      RunConfig config;
      if (!run_config_path.empty()) config = load_config(run_config_path);
      if (flag_corpus) config.corpus_path = *flag_corpus;
      if (flag_output) config.output_dir = *flag_output;
      if (flag_variant) config.variant = *flag_variant;
      if (flag_acc) config.accumulate = true;
      if (flag_no_acc) config.accumulate = false;
      if (flag_full) config.full_batch = true;
      if (flag_k) config.K = *flag_k;
      if (flag_rat) config.rationalize = true;
      if (flag_no_rat) config.rationalize = false;
      if (flag_cutoff) config.cutoff = *flag_cutoff;
      if (flag_seed) config.seed = *flag_seed;
      if (flag_max_iters) config.max_iters = *flag_max_iters;
      if (flag_sigma1) config.sigma1 = *flag_sigma1;
      if (flag_learner) config.learner = *flag_learner;
      if (flag_remote_url) config.remote_url = *flag_remote_url;
      if (flag_holdout) config.holdout_fraction = *flag_holdout;
      if (flag_alpha_source) config.alpha_source = *flag_alpha_source;
      return cmd_run(config);
    }
    if (matrix->parsed()) return cmd_matrix(matrix_path, matrix_output, matrix_jobs);
    if (synth->parsed()) {
      return cmd_make_synth(synth_out, synth_n, synth_shape, synth_mean, synth_stddev,
                            synth_mean2, synth_low, synth_high, synth_seed, synth_echo);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LearnerError& e) {
    std::cerr << "learner error: " << e.what() << "\n";
    return kExitLearnerFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLearnerFatal;
  }
  return kExitUsage;
}
