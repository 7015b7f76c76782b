#include "adastar/artifacts.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace adastar {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write artifact: " + p.string());
  return out;
}

void write_curve(const MetricsLedger& ledger, const std::filesystem::path& dir) {
  auto out = open_out(dir / "curve.csv");
  out << "iteration,cumulative_pflops,eval_accuracy,best_so_far\n";
  for (const auto& row : emit_learning_curve(ledger)) {
    out << row.t << ',' << format_double(row.cumulative_pflops) << ','
        << format_double(row.eval_accuracy) << ',' << (row.best_so_far ? 1 : 0) << '\n';
  }
}

void write_iterations(const MetricsLedger& ledger, const std::filesystem::path& dir) {
  auto out = open_out(dir / "iterations.csv");
  out << "iteration,beta,m,attempts,accepted,trained_examples,alpha,waste,exhausted,"
         "n_update,eval_accuracy\n";
  for (const auto& rec : ledger.iterations) {
    out << rec.t << ',' << rec.beta << ',' << rec.m << ',' << rec.attempts << ','
        << rec.accepted << ',' << rec.trained_examples << ',' << format_double(rec.alpha) << ','
        << rec.waste << ',' << (rec.exhausted ? 1 : 0) << ',' << rec.n_update << ','
        << format_double(rec.eval_accuracy) << '\n';
  }
}

void write_flops(const MetricsLedger& ledger, const std::filesystem::path& dir) {
  auto out = open_out(dir / "flops.csv");
  out << "iteration,inference_tokens,training_tokens,inference_flops,training_flops,"
         "cumulative_flops\n";
  for (const auto& rec : ledger.flops.records) {
    out << rec.t << ',' << rec.inference_tokens << ',' << rec.training_tokens << ','
        << format_double(rec.inference_flops) << ',' << format_double(rec.training_flops) << ','
        << format_double(rec.cumulative_flops) << '\n';
  }
}

// analysis windows from the ablation protocol, where the run is long enough
std::vector<std::pair<Iter, Iter>> freq_windows(const MetricsLedger& ledger) {
  const Iter last = ledger.iterations.empty() ? 0 : ledger.iterations.back().t;
  std::vector<std::pair<Iter, Iter>> windows;
  for (const Iter end : {2, 10, 20}) {
    if (last >= end) windows.emplace_back(1, end);
  }
  if (last >= 1) windows.emplace_back(1, last);
  return windows;
}

void write_freq_and_sd(const MetricsLedger& ledger, const std::filesystem::path& dir) {
  auto sd_out = open_out(dir / "sd_summary.csv");
  sd_out << "window_start,window_end,sd\n";
  for (const auto& [a, b] : freq_windows(ledger)) {
    const FreqTable table = trained_freq(ledger, a, b);
    const std::string name =
        "freq_" + std::to_string(a) + "_" + std::to_string(b) + ".csv";
    auto out = open_out(dir / name);
    out << "id,count\n";
    for (const auto& [id, count] : table.counts) out << id << ',' << count << '\n';
    sd_out << a << ',' << b << ',' << format_double(freq_sd(table)) << '\n';
  }
}

void write_quartiles(const MetricsLedger& ledger, const std::filesystem::path& dir) {
  const Iter last = ledger.iterations.empty() ? 0 : ledger.iterations.back().t;
  auto out = open_out(dir / "quartiles.csv");
  out << "base_start,base_end,offset,q1_stay,q4_stay\n";
  if (last >= 13) {
    const QuartileReport report = quartile_persistence(ledger, 1, 10, 3);
    out << report.base_a << ',' << report.base_b << ',' << report.offset << ','
        << format_double(report.q1_stay) << ',' << format_double(report.q4_stay) << '\n';
  }
}

void write_sched_snapshots(const MetricsLedger& ledger, const std::filesystem::path& dir) {
  if (ledger.sched_snapshots.empty()) return;
  auto out = open_out(dir / "sched_snapshots.csv");
  out << "iter,id,last_sampled,win\n";
  for (const auto& row : ledger.sched_snapshots) {
    out << row.iter << ',' << row.id << ',' << row.last_sampled << ','
        << format_double(row.win) << '\n';
  }
}

void write_summary(const MetricsLedger& ledger, const std::filesystem::path& dir,
                   const std::string& run_label, std::uint64_t seed) {
  nlohmann::json line;
  line["run"] = run_label;
  line["seed"] = seed;
  line["iterations"] = ledger.iterations.size();
  line["best_iteration"] = ledger.best_iteration;
  line["best_accuracy"] = ledger.best_accuracy;
  line["final_accuracy"] =
      ledger.iterations.empty() ? 0.0 : ledger.iterations.back().eval_accuracy;
  line["cumulative_pflops"] = ledger.flops.cumulative() / 1e15;
  long waste = 0;
  for (const auto& it : ledger.iterations) waste += it.waste;
  line["total_waste"] = waste;
  for (const auto& [a, b] : freq_windows(ledger)) {
    line["sd_" + std::to_string(a) + "_" + std::to_string(b)] =
        freq_sd(trained_freq(ledger, a, b));
  }
  // reporting slot only; filled by external CoT-quality annotation
  line["false_positive_rate"] = nullptr;

  auto out = open_out(dir / "summary.jsonl");
  out << line.dump() << '\n';
}

}  // namespace

void write_run_artifacts(const MetricsLedger& ledger, const std::filesystem::path& out_dir,
                         const std::string& run_label, std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  if (ledger.iterations.empty()) {
    throw std::runtime_error("no iterations recorded; nothing to export");
  }
  write_curve(ledger, out_dir);
  write_iterations(ledger, out_dir);
  write_flops(ledger, out_dir);
  write_freq_and_sd(ledger, out_dir);
  write_quartiles(ledger, out_dir);
  write_sched_snapshots(ledger, out_dir);
  write_summary(ledger, out_dir, run_label, seed);
}

}  // namespace adastar
