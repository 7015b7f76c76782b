#include "adastar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adastar {

void record_flops(FlopsLedger& ledger, Iter t, long long inference_tokens,
                  long long training_tokens) {
  if (inference_tokens < 0 || training_tokens < 0) {
    throw std::invalid_argument("token counts must be non-negative");
  }
  FlopsRecord rec;
  rec.t = t;
  rec.inference_tokens = inference_tokens;
  rec.training_tokens = training_tokens;
  rec.inference_flops = 2.0 * ledger.model_params * static_cast<double>(inference_tokens);
  rec.training_flops = 6.0 * ledger.model_params * static_cast<double>(training_tokens);
  rec.cumulative_flops = ledger.cumulative() + rec.inference_flops + rec.training_flops;
  ledger.records.push_back(rec);
}

FreqTable trained_freq(const MetricsLedger& ledger, Iter t_a, Iter t_b) {
  if (ledger.corpus_ids.empty()) throw std::invalid_argument("empty corpus");
  if (t_a > t_b) throw std::invalid_argument("bad frequency window");

  FreqTable table;
  table.t_a = t_a;
  table.t_b = t_b;
  for (const ObsId id : ledger.corpus_ids) table.counts[id] = 0;
  for (const auto& it : ledger.iterations) {
    if (it.t < t_a || it.t > t_b) continue;
    for (const auto& [id, count] : it.trained_counts) {
      table.counts[id] += count;
    }
  }
  return table;
}

double freq_sd(const FreqTable& table, SdMode mode) {
  const std::size_t n = table.counts.size();
  if (n == 0) throw std::invalid_argument("frequency table covers no observations");
  if (mode == SdMode::Sample && n < 2) throw std::invalid_argument("sample SD needs n >= 2");

  double mean = 0.0;
  for (const auto& [id, c] : table.counts) mean += static_cast<double>(c);
  mean /= static_cast<double>(n);

  double ss = 0.0;
  for (const auto& [id, c] : table.counts) {
    const double d = static_cast<double>(c) - mean;
    ss += d * d;
  }
  const double denom =
      mode == SdMode::Population ? static_cast<double>(n) : static_cast<double>(n - 1);
  return std::sqrt(ss / denom);
}

namespace {

// quartile index in 0..3; rank order with id tiebreak, sizes differ by <= 1
std::unordered_map<ObsId, int> quartile_of(const FreqTable& table) {
  std::vector<std::pair<long, ObsId>> order;
  order.reserve(table.counts.size());
  for (const auto& [id, c] : table.counts) order.emplace_back(c, id);
  std::sort(order.begin(), order.end());

  std::unordered_map<ObsId, int> out;
  const std::size_t n = order.size();
  for (std::size_t rank = 0; rank < n; ++rank) {
    out[order[rank].second] = static_cast<int>(rank * 4 / n);
  }
  return out;
}

}  // namespace

QuartileReport quartile_persistence(const MetricsLedger& ledger, Iter t_a, Iter t_b,
                                    Iter offset) {
  const Iter last_needed = t_b + offset;
  const Iter have = ledger.iterations.empty() ? 0 : ledger.iterations.back().t;
  if (have < last_needed) {
    throw std::invalid_argument("ledger spans too few iterations for quartile window");
  }

  const auto base = quartile_of(trained_freq(ledger, t_a, t_b));
  const auto shifted = quartile_of(trained_freq(ledger, t_a + offset, t_b + offset));

  long q1_total = 0, q1_stay = 0, q4_total = 0, q4_stay = 0;
  for (const auto& [id, q] : base) {
    if (q == 0) {
      ++q1_total;
      if (shifted.at(id) == 0) ++q1_stay;
    } else if (q == 3) {
      ++q4_total;
      if (shifted.at(id) == 3) ++q4_stay;
    }
  }

  QuartileReport report;
  report.base_a = t_a;
  report.base_b = t_b;
  report.offset = offset;
  report.q1_stay = q1_total ? static_cast<double>(q1_stay) / q1_total : 0.0;
  report.q4_stay = q4_total ? static_cast<double>(q4_stay) / q4_total : 0.0;
  return report;
}

std::vector<CurveRow> emit_learning_curve(const MetricsLedger& ledger) {
  if (ledger.iterations.empty()) throw std::invalid_argument("ledger has no eval points");

  std::vector<CurveRow> rows;
  rows.reserve(ledger.iterations.size());
  double best = -1.0;
  double cumulative = 0.0;
  std::size_t f = 0;
  for (const auto& it : ledger.iterations) {
    while (f < ledger.flops.records.size() && ledger.flops.records[f].t <= it.t) {
      cumulative = ledger.flops.records[f].cumulative_flops;
      ++f;
    }
    CurveRow row;
    row.t = it.t;
    row.cumulative_pflops = cumulative / 1e15;
    row.eval_accuracy = it.eval_accuracy;
    if (it.eval_accuracy > best) {
      best = it.eval_accuracy;
      row.best_so_far = true;
    }
    rows.push_back(row);
  }
  return rows;
}

std::map<long, long> histogram(const FreqTable& table, long bin_width) {
  if (bin_width < 1) throw std::invalid_argument("bin width must be >= 1");
  std::map<long, long> bins;
  for (const auto& [id, c] : table.counts) {
    bins[(c / bin_width) * bin_width] += 1;
  }
  return bins;
}

}  // namespace adastar
