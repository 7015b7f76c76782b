#ifndef ADASTAR_METRICS_HPP
#define ADASTAR_METRICS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "adastar/corpus.hpp"
#include "adastar/sched.hpp"

namespace adastar {

// Kaplan-style accounting: 2 * params * tokens for inference, 6 for training.
struct FlopsRecord {
  Iter t = 0;
  long long inference_tokens = 0;
  long long training_tokens = 0;
  double inference_flops = 0.0;
  double training_flops = 0.0;
  double cumulative_flops = 0.0;
};

struct FlopsLedger {
  double model_params = 0.0;
  std::vector<FlopsRecord> records;

  double cumulative() const {
    return records.empty() ? 0.0 : records.back().cumulative_flops;
  }
};

void record_flops(FlopsLedger& ledger, Iter t, long long inference_tokens,
                  long long training_tokens);

// Everything one iteration leaves behind.
struct IterationRecord {
  Iter t = 0;
  std::size_t m = 0;          // observations drawn
  long attempts = 0;          // generation calls, rationalized retries included
  long accepted = 0;          // |D_+^t| before any down-sampling or dedup
  long trained_examples = 0;  // batch actually passed to train
  long accepted_before_last_draw = 0;  // Remark-1 stopping check (adaptive)
  bool exhausted = false;     // corpus ran out before the batch budget filled
  bool trained = false;       // false when D_+^t was empty
  double alpha = 0.0;
  long waste = 0;             // max(0, M^t - beta^t) under exhaustive sampling
  long long beta = 0;
  long long inference_tokens = 0;
  long long training_tokens = 0;
  double eval_accuracy = 0.0;
  std::unordered_map<ObsId, long> trained_counts;  // per-id multiplicity
  std::vector<ObsId> sampled_ids;  // draw order (adaptive variants)
  std::size_t n_update = 0;        // committed stat updates (adaptive variants)
};

struct MetricsLedger {
  std::vector<ObsId> corpus_ids;  // training corpus; never-trained ids count as zero
  std::vector<IterationRecord> iterations;
  FlopsLedger flops;
  std::vector<SchedSnapshotRow> sched_snapshots;
  Iter best_iteration = 0;
  double best_accuracy = 0.0;
};

// Trained-frequency counts over the inclusive iteration window [t_a, t_b].
struct FreqTable {
  Iter t_a = 0;
  Iter t_b = 0;
  std::map<ObsId, long> counts;  // one entry per corpus id
};

FreqTable trained_freq(const MetricsLedger& ledger, Iter t_a, Iter t_b);

enum class SdMode { Population, Sample };

double freq_sd(const FreqTable& table, SdMode mode = SdMode::Population);

struct QuartileReport {
  double q1_stay = 0.0;
  double q4_stay = 0.0;
  Iter base_a = 0, base_b = 0;
  Iter offset = 0;
};

// Rank-based quartiles of trained frequency (ties by id) over [t_a, t_b],
// recomputed over the window shifted by offset.
QuartileReport quartile_persistence(const MetricsLedger& ledger, Iter t_a, Iter t_b,
                                    Iter offset);

struct CurveRow {
  Iter t = 0;
  double cumulative_pflops = 0.0;
  double eval_accuracy = 0.0;
  bool best_so_far = false;
};

std::vector<CurveRow> emit_learning_curve(const MetricsLedger& ledger);

// count-value -> number of ids, with the given bin width. Bin mass sums to N.
std::map<long, long> histogram(const FreqTable& table, long bin_width = 1);

}  // namespace adastar

#endif
