#ifndef ADASTAR_ENGINE_HPP
#define ADASTAR_ENGINE_HPP

#include <memory>
#include <optional>
#include <string>

#include "adastar/corpus.hpp"
#include "adastar/learner.hpp"
#include "adastar/metrics.hpp"
#include "adastar/sched.hpp"

namespace adastar {

enum class Variant {
  AdaSTaR,     // adaptive diversity + curriculum
  AdaD,        // adaptive diversity only (curriculum off, all drawn ids updated)
  WoWin,       // adaptive on last-sampled iteration alone
  PF,          // priority flipped: win before last-sampled
  StarRandom,  // uniform sampling baselines (STaR / -Acc / -Full / ReST-EM)
};

bool is_adaptive(Variant v);
PriorityOrder priority_order_for(Variant v);

enum class AlphaSource { SamplingRate, LearnerReported };

// The knob bundle distinguishing every training-loop flavor.
struct IterationPolicy {
  Variant variant = Variant::AdaSTaR;
  bool accumulate = true;
  bool full_batch = false;
  int K = 2;
  bool rationalize = true;
  std::optional<int> restem_cutoff;
  CurriculumShape curriculum_shape = CurriculumShape::Square;
  std::optional<double> alpha_override;  // diagnostic: fixes the curriculum input
};

// Named baseline presets: star, star-full, star-acc, star-acc-full,
// star-acc-full-k, restem, adastar, adad, wo-win, pf.
IterationPolicy policy_from_preset(const std::string& name);
void validate_policy(const IterationPolicy& policy);

// Gradient-step budget per iteration: sigma(1) = sigma1, then
// sigma(t+1) = floor(growth * sigma(t)); beta(t) = sigma(t) * base_batch.
struct BatchSchedule {
  int sigma1 = 40;
  int base_batch = 8;
  double growth = 1.2;

  int sigma(Iter t) const;
  long long beta(Iter t) const { return static_cast<long long>(sigma(t)) * base_batch; }
};

struct AcceptedSample {
  ObsId id = 0;
  bool rationalized = false;
  int cot_tokens = 0;
  std::optional<std::string> cot_text;
  std::optional<std::string> answer_text;
};

// All CoT samples for one observation at iteration t: K unaided draws, or one
// unaided draw plus a rationalized retry on failure when the policy allows it.
std::vector<GenerationOutcome> sample_observation(LearnerBackend& learner, const Corpus& corpus,
                                                  ObsId id, Iter t,
                                                  const IterationPolicy& policy);

// Whole-corpus generation pass used by the uniform-sampling baselines.
// parallel=true runs the per-observation loop under OpenMP; outcomes are
// identical to the serial pass because backends draw from per-sample streams.
std::vector<std::vector<GenerationOutcome>> sweep_outcomes(LearnerBackend& learner,
                                                           const Corpus& corpus,
                                                           const std::vector<ObsId>& ids, Iter t,
                                                           const IterationPolicy& policy,
                                                           bool parallel);

// Per-observation cap on accepted samples, keeping first-by-k order.
std::vector<AcceptedSample> dedup_restem(const std::vector<AcceptedSample>& accepted, int cutoff);

struct ExperimentSetup {
  IterationPolicy policy;
  BatchSchedule schedule;
  std::uint64_t seed = 10;
  int max_iters = 10;
  AlphaSource alpha_source = AlphaSource::SamplingRate;
  double model_params = 3e9;
};

// Drives the iteration loop for one run. Single-threaded by contract; the
// learner may parallelize generation internally.
class Experiment {
 public:
  Experiment(const ExperimentSetup& setup, const Corpus& train, const Corpus& holdout,
             LearnerBackend& learner);
  // corpora are referenced for the whole run; temporaries would dangle
  Experiment(const ExperimentSetup&, Corpus&&, const Corpus&, LearnerBackend&) = delete;
  Experiment(const ExperimentSetup&, const Corpus&, Corpus&&, LearnerBackend&) = delete;

  IterationRecord run_iteration(Iter t);

  // Loops run_iteration up to max_iters, evaluating after each iteration and
  // tracking the early-stopping peak. On a fatal learner error the partial
  // ledger is preserved and fatal_error() is set.
  const MetricsLedger& run();

  const MetricsLedger& ledger() const { return ledger_; }
  const std::optional<std::string>& fatal_error() const { return fatal_error_; }
  const Scheduler* scheduler() const { return scheduler_.get(); }

 private:
  IterationRecord run_adaptive_iteration(Iter t);
  IterationRecord run_random_iteration(Iter t);
  void train_and_finalize(IterationRecord& rec, std::vector<AcceptedSample> batch,
                          long pre_dedup_accepted, long attempts);
  double curriculum_alpha(const IterationRecord& rec) const;

  ExperimentSetup setup_;
  const Corpus& train_;
  const Corpus& holdout_;
  LearnerBackend& learner_;
  std::unique_ptr<Scheduler> scheduler_;  // adaptive variants only
  MetricsLedger ledger_;
  std::optional<std::string> fatal_error_;
};

}  // namespace adastar

#endif
