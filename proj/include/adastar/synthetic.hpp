#ifndef ADASTAR_SYNTHETIC_HPP
#define ADASTAR_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "adastar/learner.hpp"

namespace adastar {

struct SyntheticParams {
  double eta_global = 4.0;   // global skill gain, scaled by |batch| / N
  double eta_obs = 0.3;      // per-observation skill gain per trained example
  double slope = 1.5;        // temperature slope of the success sigmoid
  double hint_boost = 0.4;   // rationalization success bonus, capped at p=1
  int cot_min_tokens = 16;
  int cot_max_tokens = 128;
};

// Seeded stand-in for an LM: per-observation success probability
// sigmoid(slope * (global_skill + per_obs_skill - difficulty)). Training
// raises the trained observations' skill and a little global skill.
class SyntheticLearner : public LearnerBackend {
 public:
  SyntheticLearner(const SyntheticParams& params, const Corpus& full_corpus,
                   std::size_t train_corpus_size, std::uint64_t seed);

  GenerationOutcome generate(const GenContext& ctx,
                             std::optional<std::string_view> hint) override;
  TrainReport train(std::span<const TrainExample> batch, bool accumulate,
                    double sampling_alpha) override;
  void reset_to_base() override;
  double evaluate(const Corpus& holdout, Iter t) override;
  bool parallel_generation_safe() const override { return true; }

  double success_probability(ObsId id) const;
  double global_skill() const { return global_skill_; }
  double per_obs_skill(ObsId id) const;
  double difficulty(ObsId id) const { return difficulty_.at(id); }

  // Serial reference for the OpenMP evaluate kernel; kept for testing.
  double evaluate_serial(const Corpus& holdout, Iter t) const;

 private:
  double generation_probability(ObsId id, std::optional<std::string_view> hint) const;
  long count_eval_hits_serial(const Corpus& holdout, Iter t) const;
  long count_eval_hits_parallel(const Corpus& holdout, Iter t) const;

  SyntheticParams params_;
  std::size_t corpus_n_;
  std::uint64_t seed_;
  std::unordered_map<ObsId, double> difficulty_;

  double global_skill_ = 0.0;
  std::unordered_map<ObsId, double> obs_skill_;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Synthetic corpora carry their latent difficulty under meta.difficulty.
struct DifficultySpec {
  enum class Shape { Normal, Bimodal, Uniform };
  Shape shape = Shape::Normal;
  double mean = 0.0;
  double stddev = 1.0;  // per-mode spread for bimodal
  double mean2 = 0.0;   // second bimodal mode
  double low = -2.0;
  double high = 2.0;
};

// echo_answer embeds the gold answer as the question's last token, which the
// bundled stub server can then "solve".
Corpus make_synthetic_corpus(long n, const DifficultySpec& spec, std::uint64_t seed,
                             bool echo_answer = false);

}  // namespace adastar

#endif
