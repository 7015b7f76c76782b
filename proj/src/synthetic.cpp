#include "adastar/synthetic.hpp"

#include <algorithm>

#include "adastar/rng.hpp"

namespace adastar {

SyntheticLearner::SyntheticLearner(const SyntheticParams& params, const Corpus& full_corpus,
                                   std::size_t train_corpus_size, std::uint64_t seed)
    : params_(params), corpus_n_(train_corpus_size), seed_(seed) {
  difficulty_.reserve(full_corpus.size());
  for (const auto& obs : full_corpus.observations()) {
    if (const auto d = obs.difficulty()) {
      difficulty_[obs.id] = *d;
    } else {
      RngStream rng = substream(seed_, StreamTag::Difficulty, {static_cast<std::uint64_t>(obs.id)});
      difficulty_[obs.id] = rng.next_normal();
    }
  }
}

double SyntheticLearner::per_obs_skill(ObsId id) const {
  const auto it = obs_skill_.find(id);
  return it == obs_skill_.end() ? 0.0 : it->second;
}

double SyntheticLearner::success_probability(ObsId id) const {
  return sigmoid(params_.slope * (global_skill_ + per_obs_skill(id) - difficulty_.at(id)));
}

double SyntheticLearner::generation_probability(ObsId id,
                                                std::optional<std::string_view> hint) const {
  double p = success_probability(id);
  if (hint) p = std::min(1.0, p + params_.hint_boost);
  return p;
}

GenerationOutcome SyntheticLearner::generate(const GenContext& ctx,
                                             std::optional<std::string_view> hint) {
  const auto id_word = static_cast<std::uint64_t>(ctx.id);
  const auto t_word = static_cast<std::uint64_t>(ctx.t);
  const auto k_word = static_cast<std::uint64_t>(ctx.k);
  const std::uint64_t r_word = ctx.rationalized ? 1 : 0;

  GenerationOutcome out;
  out.rationalized = ctx.rationalized;

  RngStream hit_rng = substream(seed_, StreamTag::Generation, {t_word, id_word, k_word, r_word});
  out.hit = hit_rng.bernoulli(generation_probability(ctx.id, hint));

  RngStream tok_rng = substream(seed_, StreamTag::CotTokens, {t_word, id_word, k_word, r_word});
  out.cot_tokens =
      static_cast<int>(tok_rng.next_int(params_.cot_min_tokens, params_.cot_max_tokens));
  return out;
}

TrainReport SyntheticLearner::train(std::span<const TrainExample> batch, bool accumulate,
                                    double sampling_alpha) {
  if (batch.empty()) throw std::invalid_argument("train called with empty batch");
  if (!accumulate) reset_to_base();

  TrainReport report;
  for (const auto& ex : batch) {
    obs_skill_[ex.id] += params_.eta_obs;
    report.trained_tokens += ex.cot_tokens;
  }
  global_skill_ += params_.eta_global * static_cast<double>(batch.size()) /
                   static_cast<double>(corpus_n_);
  report.trained_examples = static_cast<long>(batch.size());
  report.alpha = sampling_alpha;
  return report;
}

void SyntheticLearner::reset_to_base() {
  global_skill_ = 0.0;
  obs_skill_.clear();
}

long SyntheticLearner::count_eval_hits_serial(const Corpus& holdout, Iter t) const {
  long hits = 0;
  for (const auto& obs : holdout.observations()) {
    RngStream rng = substream(seed_, StreamTag::EvalDraw,
                              {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(obs.id)});
    if (rng.bernoulli(success_probability(obs.id))) ++hits;
  }
  return hits;
}

long SyntheticLearner::count_eval_hits_parallel(const Corpus& holdout, Iter t) const {
  const auto n = static_cast<std::int64_t>(holdout.size());
  long hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Observation& obs = holdout.at(static_cast<std::size_t>(i));
    RngStream rng = substream(seed_, StreamTag::EvalDraw,
                              {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(obs.id)});
    if (rng.bernoulli(success_probability(obs.id))) ++hits;
  }
  return hits;
}

double SyntheticLearner::evaluate_serial(const Corpus& holdout, Iter t) const {
  if (holdout.empty()) return 0.0;
  return static_cast<double>(count_eval_hits_serial(holdout, t)) /
         static_cast<double>(holdout.size());
}

double SyntheticLearner::evaluate(const Corpus& holdout, Iter t) {
  if (holdout.empty()) return 0.0;
  // integer hit count, so the parallel reduction is bit-identical to serial
  return static_cast<double>(count_eval_hits_parallel(holdout, t)) /
         static_cast<double>(holdout.size());
}

Corpus make_synthetic_corpus(long n, const DifficultySpec& spec, std::uint64_t seed,
                             bool echo_answer) {
  if (n < 1) throw std::invalid_argument("synthetic corpus needs n >= 1");
  std::vector<Observation> observations;
  observations.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    RngStream rng = substream(seed, StreamTag::SynthCorpus, {static_cast<std::uint64_t>(i)});
    double d = 0.0;
    switch (spec.shape) {
      case DifficultySpec::Shape::Normal:
        d = spec.mean + spec.stddev * rng.next_normal();
        break;
      case DifficultySpec::Shape::Bimodal:
        d = (rng.bernoulli(0.5) ? spec.mean : spec.mean2) + spec.stddev * rng.next_normal();
        break;
      case DifficultySpec::Shape::Uniform:
        d = spec.low + (spec.high - spec.low) * rng.next_unit();
        break;
    }
    Observation obs;
    obs.id = static_cast<ObsId>(i);
    const std::string answer = std::to_string(100 + i);
    obs.question = echo_answer
                       ? "task " + std::to_string(i) + ": respond with token " + answer
                       : "task " + std::to_string(i) + ": recall the canonical token";
    obs.answer = answer;
    obs.meta = {{"difficulty", d}};
    observations.push_back(std::move(obs));
  }
  return Corpus("synthetic", std::move(observations));
}

}  // namespace adastar
