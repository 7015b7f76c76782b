#include "adastar/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "adastar/rng.hpp"

namespace adastar {

bool is_adaptive(Variant v) { return v != Variant::StarRandom; }

PriorityOrder priority_order_for(Variant v) {
  switch (v) {
    case Variant::WoWin: return PriorityOrder::TimeOnly;
    case Variant::PF: return PriorityOrder::WinThenTime;
    default: return PriorityOrder::TimeThenWin;
  }
}

IterationPolicy policy_from_preset(const std::string& name) {
  IterationPolicy p;
  if (name == "adastar") {
    p.variant = Variant::AdaSTaR;
  } else if (name == "adad") {
    p.variant = Variant::AdaD;
  } else if (name == "wo-win") {
    p.variant = Variant::WoWin;
  } else if (name == "pf") {
    p.variant = Variant::PF;
  } else if (name == "star") {
    p.variant = Variant::StarRandom;
    p.accumulate = false;
  } else if (name == "star-acc") {
    p.variant = Variant::StarRandom;
  } else if (name == "star-full") {
    p.variant = Variant::StarRandom;
    p.accumulate = false;
    p.full_batch = true;
  } else if (name == "star-acc-full") {
    p.variant = Variant::StarRandom;
    p.full_batch = true;
  } else if (name == "star-acc-full-k") {
    p.variant = Variant::StarRandom;
    p.full_batch = true;
    p.K = 5;
    p.rationalize = false;
  } else if (name == "restem") {
    p.variant = Variant::StarRandom;
    p.accumulate = false;
    p.full_batch = true;
    p.K = 11;
    p.rationalize = false;
    p.restem_cutoff = 3;
  } else {
    throw std::invalid_argument("unknown policy preset: " + name);
  }
  return p;
}

void validate_policy(const IterationPolicy& policy) {
  if (policy.K < 1) throw std::invalid_argument("K must be >= 1");
  if (policy.rationalize && policy.K != 2) {
    throw std::invalid_argument("rationalization requires K = 2 (one plain draw plus one retry)");
  }
  if (policy.restem_cutoff) {
    if (*policy.restem_cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
    if (policy.variant != Variant::StarRandom || !policy.full_batch) {
      throw std::invalid_argument("cutoff applies to the uniform full-batch baseline only");
    }
  }
  if (policy.alpha_override &&
      !(*policy.alpha_override >= 0.0 && *policy.alpha_override <= 1.0)) {
    throw std::invalid_argument("alpha_override must lie in [0, 1]");
  }
}

int BatchSchedule::sigma(Iter t) const {
  if (t < 1) throw std::invalid_argument("iterations start at 1");
  int s = sigma1;
  for (Iter i = 1; i < t; ++i) {
    s = static_cast<int>(std::floor(growth * static_cast<double>(s)));
  }
  return s;
}

std::vector<GenerationOutcome> sample_observation(LearnerBackend& learner, const Corpus& corpus,
                                                  ObsId id, Iter t,
                                                  const IterationPolicy& policy) {
  std::vector<GenerationOutcome> outs;
  if (policy.rationalize) {
    // one unaided draw; on failure a single retry with the gold answer as hint
    outs.push_back(learner.generate(GenContext{t, id, 1, false}, std::nullopt));
    if (!outs.back().hit) {
      const std::string& gold = corpus.by_id(id).answer;
      outs.push_back(learner.generate(GenContext{t, id, 1, true}, gold));
    }
  } else {
    outs.reserve(static_cast<std::size_t>(policy.K));
    for (int k = 1; k <= policy.K; ++k) {
      outs.push_back(learner.generate(GenContext{t, id, k, false}, std::nullopt));
    }
  }
  return outs;
}

std::vector<std::vector<GenerationOutcome>> sweep_outcomes(LearnerBackend& learner,
                                                           const Corpus& corpus,
                                                           const std::vector<ObsId>& ids, Iter t,
                                                           const IterationPolicy& policy,
                                                           bool parallel) {
  std::vector<std::vector<GenerationOutcome>> out(ids.size());
  if (parallel && learner.parallel_generation_safe()) {
    const auto n = static_cast<std::int64_t>(ids.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] =
          sample_observation(learner, corpus, ids[static_cast<std::size_t>(i)], t, policy);
    }
  } else {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      out[i] = sample_observation(learner, corpus, ids[i], t, policy);
    }
  }
  return out;
}

std::vector<AcceptedSample> dedup_restem(const std::vector<AcceptedSample>& accepted, int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  std::unordered_map<ObsId, int> kept;
  std::vector<AcceptedSample> out;
  out.reserve(accepted.size());
  for (const auto& sample : accepted) {
    if (kept[sample.id] < cutoff) {
      ++kept[sample.id];
      out.push_back(sample);
    }
  }
  return out;
}

namespace {

AcceptedSample make_accepted(ObsId id, const GenerationOutcome& out) {
  AcceptedSample s;
  s.id = id;
  s.rationalized = out.rationalized;
  s.cot_tokens = out.cot_tokens;
  s.cot_text = out.cot_text;
  s.answer_text = out.answer_text;
  return s;
}

std::vector<TrainExample> to_train_examples(const Corpus& corpus,
                                            const std::vector<AcceptedSample>& batch) {
  std::vector<TrainExample> out;
  out.reserve(batch.size());
  for (const auto& s : batch) {
    TrainExample ex;
    ex.id = s.id;
    ex.cot_tokens = s.cot_tokens;
    ex.rationalized = s.rationalized;
    ex.cot = s.cot_text.value_or("");
    ex.answer = s.answer_text ? *s.answer_text : corpus.by_id(s.id).answer;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

Experiment::Experiment(const ExperimentSetup& setup, const Corpus& train, const Corpus& holdout,
                       LearnerBackend& learner)
    : setup_(setup), train_(train), holdout_(holdout), learner_(learner) {
  validate_policy(setup_.policy);
  if (is_adaptive(setup_.policy.variant)) {
    scheduler_ = std::make_unique<Scheduler>(train_, priority_order_for(setup_.policy.variant));
  }
  ledger_.corpus_ids = train_.ids();
  std::sort(ledger_.corpus_ids.begin(), ledger_.corpus_ids.end());
  ledger_.flops.model_params = setup_.model_params;
}

double Experiment::curriculum_alpha(const IterationRecord& rec) const {
  if (setup_.policy.alpha_override) return *setup_.policy.alpha_override;
  return std::clamp(rec.alpha, 0.0, 1.0);
}

void Experiment::train_and_finalize(IterationRecord& rec, std::vector<AcceptedSample> batch,
                                    long pre_dedup_accepted, long attempts) {
  const double sampling_alpha =
      attempts > 0 ? static_cast<double>(pre_dedup_accepted) / static_cast<double>(attempts)
                   : 0.0;

  long long training_tokens = 0;
  if (!batch.empty()) {
    const auto examples = to_train_examples(train_, batch);
    const TrainReport report =
        learner_.train(examples, setup_.policy.accumulate, sampling_alpha);
    rec.trained = true;
    rec.trained_examples = static_cast<long>(examples.size());
    training_tokens = report.trained_tokens;
    rec.alpha = setup_.alpha_source == AlphaSource::LearnerReported ? report.alpha
                                                                    : sampling_alpha;
    for (const auto& s : batch) rec.trained_counts[s.id] += 1;
  } else {
    // zero successes: no train step, alpha drops to 0
    rec.alpha = 0.0;
  }
  rec.training_tokens = training_tokens;
  record_flops(ledger_.flops, rec.t, rec.inference_tokens, training_tokens);
}

IterationRecord Experiment::run_adaptive_iteration(Iter t) {
  IterationRecord rec;
  rec.t = t;
  rec.beta = setup_.schedule.beta(t);

  IterationDraft draft;
  std::vector<AcceptedSample> accepted;
  long attempts = 0;

  while (true) {
    if (static_cast<long long>(accepted.size()) >= rec.beta) break;
    const auto id_opt = scheduler_->peek_next(draft);
    if (!id_opt) {
      rec.exhausted = true;  // shortfall: train on whatever we have
      break;
    }
    const ObsId id = *id_opt;
    rec.accepted_before_last_draw = static_cast<long>(accepted.size());

    const auto outs = sample_observation(learner_, train_, id, t, setup_.policy);
    int unaided_k = 0;
    for (const auto& out : outs) {
      ++attempts;
      rec.inference_tokens += out.cot_tokens;
      if (!out.rationalized) {
        // hinted successes are no evidence of unaided ability
        ++unaided_k;
        scheduler_->update_tmp_win(draft, id, unaided_k, out.hit);
      }
      if (out.hit) accepted.push_back(make_accepted(id, out));
    }
  }

  rec.m = draft.m();
  rec.attempts = attempts;
  rec.accepted = static_cast<long>(accepted.size());
  rec.sampled_ids = draft.sampled_ids;

  train_and_finalize(rec, accepted, rec.accepted, attempts);

  const std::size_t n_update =
      setup_.policy.variant == Variant::AdaD
          ? draft.m()
          : curriculum_count(draft.m(), curriculum_alpha(rec), setup_.policy.curriculum_shape);
  rec.n_update = n_update;
  scheduler_->commit_iteration(draft, t, n_update);

  for (const auto& row : snapshot_rows(*scheduler_, t)) ledger_.sched_snapshots.push_back(row);
  return rec;
}

IterationRecord Experiment::run_random_iteration(Iter t) {
  IterationRecord rec;
  rec.t = t;
  rec.beta = setup_.schedule.beta(t);

  // classic STaR inferences the whole dataset, then filters
  std::vector<ObsId> order = train_.ids();
  RngStream order_rng = substream(setup_.seed, StreamTag::DrawOrder, {static_cast<std::uint64_t>(t)});
  shuffle(order, order_rng);

  const auto outcomes = sweep_outcomes(learner_, train_, order, t, setup_.policy,
                                       learner_.parallel_generation_safe());

  std::vector<AcceptedSample> accepted;
  long attempts = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& out : outcomes[i]) {
      ++attempts;
      rec.inference_tokens += out.cot_tokens;
      if (out.hit) accepted.push_back(make_accepted(order[i], out));
    }
  }

  rec.m = order.size();
  rec.attempts = attempts;
  rec.accepted = static_cast<long>(accepted.size());
  const long pre_dedup = rec.accepted;

  if (setup_.policy.restem_cutoff) {
    accepted = dedup_restem(accepted, *setup_.policy.restem_cutoff);
  }

  std::vector<AcceptedSample> batch;
  if (setup_.policy.full_batch) {
    batch = std::move(accepted);  // beta^t := |D_+^t|, nothing discarded
  } else {
    rec.waste = std::max<long>(0, pre_dedup - static_cast<long>(rec.beta));
    RngStream ds_rng = substream(setup_.seed, StreamTag::Downsample, {static_cast<std::uint64_t>(t)});
    shuffle(accepted, ds_rng);
    const auto keep = std::min<std::size_t>(accepted.size(), static_cast<std::size_t>(rec.beta));
    batch.assign(accepted.begin(), accepted.begin() + static_cast<std::ptrdiff_t>(keep));
  }

  train_and_finalize(rec, std::move(batch), pre_dedup, attempts);
  return rec;
}

IterationRecord Experiment::run_iteration(Iter t) {
  return is_adaptive(setup_.policy.variant) ? run_adaptive_iteration(t)
                                            : run_random_iteration(t);
}

const MetricsLedger& Experiment::run() {
  for (Iter t = 1; t <= setup_.max_iters; ++t) {
    IterationRecord rec;
    try {
      rec = run_iteration(t);
    } catch (const LearnerError& err) {
      if (!err.fatal) throw;
      fatal_error_ = err.what();  // partial ledger stays intact
      break;
    }
    rec.eval_accuracy = holdout_.empty() ? 0.0 : learner_.evaluate(holdout_, t);
    // peak accuracy; ties keep the earlier iteration
    if (ledger_.best_iteration == 0 || rec.eval_accuracy > ledger_.best_accuracy) {
      ledger_.best_accuracy = rec.eval_accuracy;
      ledger_.best_iteration = t;
    }
    ledger_.iterations.push_back(std::move(rec));
  }
  return ledger_;
}

}  // namespace adastar
