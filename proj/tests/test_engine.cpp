#include <doctest.h>

#include <vector>

#include "adastar/engine.hpp"
#include "adastar/rng.hpp"
#include "adastar/synthetic.hpp"

using namespace adastar;

namespace {

Corpus normal_corpus(int n, std::uint64_t seed) {
  std::vector<Observation> obs;
  RngStream rng = substream(seed, StreamTag::SynthCorpus);
  for (int i = 0; i < n; ++i) {
    Observation o;
    o.id = i;
    o.question = "q" + std::to_string(i);
    o.answer = std::to_string(100 + i);
    o.meta = {{"difficulty", rng.next_normal()}};
    obs.push_back(std::move(o));
  }
  return Corpus("normal", std::move(obs));
}

const Corpus& holdout_stub() {
  static const Corpus holdout("holdout", {{0, "q", "a", {{"difficulty", 0.0}}}});
  return holdout;
}

ExperimentSetup desk_setup(const IterationPolicy& policy, int max_iters = 5,
                           std::uint64_t seed = 10) {
  ExperimentSetup setup;
  setup.policy = policy;
  setup.schedule = BatchSchedule{5, 8, 1.2};  // beta^1 = 40 at desk scale
  setup.seed = seed;
  setup.max_iters = max_iters;
  return setup;
}

}  // namespace

TEST_CASE("gradient-step schedule follows the floor recurrence") {
  const BatchSchedule schedule;  // sigma1=40, batch 8, growth 1.2
  CHECK(schedule.sigma(1) == 40);
  CHECK(schedule.sigma(2) == 48);
  CHECK(schedule.sigma(3) == 57);
  CHECK(schedule.sigma(4) == 68);
  CHECK(schedule.sigma(5) == 81);  // floor(1.2 * 68)
  CHECK(schedule.beta(1) == 320);
  CHECK(schedule.beta(2) == 384);
  CHECK(schedule.beta(3) == 456);
  CHECK_THROWS_AS(schedule.sigma(0), std::invalid_argument);
}

TEST_CASE("policy presets match the baseline family") {
  const auto star = policy_from_preset("star");
  CHECK(star.variant == Variant::StarRandom);
  CHECK_FALSE(star.accumulate);
  CHECK_FALSE(star.full_batch);
  CHECK(star.K == 2);
  CHECK(star.rationalize);

  const auto full_k = policy_from_preset("star-acc-full-k");
  CHECK(full_k.accumulate);
  CHECK(full_k.full_batch);
  CHECK(full_k.K == 5);
  CHECK_FALSE(full_k.rationalize);

  const auto restem = policy_from_preset("restem");
  CHECK(restem.K == 11);
  CHECK(restem.restem_cutoff == 3);
  CHECK_FALSE(restem.accumulate);
  CHECK(restem.full_batch);

  CHECK(policy_from_preset("adastar").variant == Variant::AdaSTaR);
  CHECK_THROWS_AS(policy_from_preset("bogus"), std::invalid_argument);
}

TEST_CASE("policy validation rejects bad knob bundles") {
  IterationPolicy p = policy_from_preset("adastar");
  p.K = 5;  // rationalization stays on
  CHECK_THROWS_AS(validate_policy(p), std::invalid_argument);

  IterationPolicy q = policy_from_preset("adastar");
  q.restem_cutoff = 3;
  CHECK_THROWS_AS(validate_policy(q), std::invalid_argument);
}

TEST_CASE("restem dedup caps per-id multiplicity keeping first-by-k order") {
  std::vector<AcceptedSample> accepted;
  for (int k = 0; k < 8; ++k) accepted.push_back(AcceptedSample{7, false, k, {}, {}});
  for (int k = 0; k < 2; ++k) accepted.push_back(AcceptedSample{9, false, 100 + k, {}, {}});

  const auto deduped = dedup_restem(accepted, 3);
  long id7 = 0, id9 = 0;
  for (const auto& s : deduped) (s.id == 7 ? id7 : id9) += 1;
  CHECK(id7 == 3);  // 8:2 shrinks to 3:2
  CHECK(id9 == 2);
  CHECK(deduped[0].cot_tokens == 0);
  CHECK(deduped[1].cot_tokens == 1);
  CHECK(deduped[2].cot_tokens == 2);

  CHECK(dedup_restem(accepted, 1).size() == 2);
  const auto identity = dedup_restem(accepted, 8);
  CHECK(identity.size() == accepted.size());
}

TEST_CASE("adaptive iteration obeys the stopping rule") {
  const Corpus corpus = normal_corpus(400, 21);
  IterationPolicy policy = policy_from_preset("adastar");
  policy.rationalize = false;  // two unaided draws per observation
  const auto setup = desk_setup(policy, 3);
  SyntheticLearner learner(SyntheticParams{}, corpus, corpus.size(), setup.seed);
  Experiment experiment(setup, corpus, holdout_stub(), learner);

  const auto& ledger = experiment.run();
  REQUIRE(ledger.iterations.size() == 3);
  for (const auto& rec : ledger.iterations) {
    CHECK(rec.m <= corpus.size());
    if (!rec.exhausted) {
      // accepted first reaches beta at the final draw
      CHECK(rec.accepted >= rec.beta);
      CHECK(rec.accepted_before_last_draw < rec.beta);
      CHECK(rec.accepted <= rec.beta + policy.K - 1);
    }
    CHECK(rec.attempts <= static_cast<long>(rec.m) * policy.K);
    CHECK(rec.waste == 0);
  }
}

TEST_CASE("rationalized retries are bounded and excluded from win updates") {
  const Corpus corpus = normal_corpus(200, 22);
  const IterationPolicy policy = policy_from_preset("adastar");  // K=2, rationalize
  const auto setup = desk_setup(policy, 2);
  SyntheticLearner learner(SyntheticParams{}, corpus, corpus.size(), setup.seed);
  Experiment experiment(setup, corpus, holdout_stub(), learner);

  const auto& ledger = experiment.run();
  for (const auto& rec : ledger.iterations) {
    // one unaided draw plus at most one rationalized retry per drawn id
    CHECK(rec.attempts >= static_cast<long>(rec.m));
    CHECK(rec.attempts <= 2 * static_cast<long>(rec.m));
    CHECK(rec.accepted <= static_cast<long>(rec.m));
  }
  // win statistics stay multiples of 1/1 (single unaided sample): 0 or 1
  const auto* sched = experiment.scheduler();
  REQUIRE(sched != nullptr);
  for (const auto& [id, st] : sched->all_stats()) {
    CHECK((st.win == 0.0 || st.win == 1.0));
  }
}

TEST_CASE("alpha forced to 1 reduces AdaSTaR to AdaD exactly") {
  const Corpus corpus = normal_corpus(150, 23);

  IterationPolicy forced = policy_from_preset("adastar");
  forced.alpha_override = 1.0;
  IterationPolicy adad = policy_from_preset("adad");

  SyntheticLearner l1(SyntheticParams{}, corpus, corpus.size(), 10);
  SyntheticLearner l2(SyntheticParams{}, corpus, corpus.size(), 10);
  Experiment e1(desk_setup(forced, 6), corpus, holdout_stub(), l1);
  Experiment e2(desk_setup(adad, 6), corpus, holdout_stub(), l2);
  const auto& ledger1 = e1.run();
  const auto& ledger2 = e2.run();

  REQUIRE(ledger1.iterations.size() == ledger2.iterations.size());
  for (std::size_t i = 0; i < ledger1.iterations.size(); ++i) {
    const auto& a = ledger1.iterations[i];
    const auto& b = ledger2.iterations[i];
    CHECK(a.sampled_ids == b.sampled_ids);  // identical pop trace
    CHECK(a.n_update == b.n_update);        // identical commit trace
    CHECK(a.n_update == a.m);
  }
}

TEST_CASE("uniform baseline samples exhaustively and accounts waste") {
  const Corpus corpus = normal_corpus(120, 24);
  const IterationPolicy policy = policy_from_preset("star-acc");
  auto setup = desk_setup(policy, 2);
  SyntheticLearner learner(SyntheticParams{}, corpus, corpus.size(), setup.seed);
  Experiment experiment(setup, corpus, holdout_stub(), learner);

  const auto& ledger = experiment.run();
  for (const auto& rec : ledger.iterations) {
    CHECK(rec.m == corpus.size());  // the whole dataset is inferenced
    CHECK(rec.waste == std::max<long>(0, rec.accepted - static_cast<long>(rec.beta)));
    CHECK(rec.trained_examples <= rec.beta);
    // recount waste from raw outcome counts
    CHECK(rec.accepted - rec.trained_examples == rec.waste);
  }
}

TEST_CASE("full-batch baseline trains on everything accepted, waste zero") {
  const Corpus corpus = normal_corpus(80, 25);
  const IterationPolicy policy = policy_from_preset("star-acc-full");
  auto setup = desk_setup(policy, 2);
  SyntheticLearner learner(SyntheticParams{}, corpus, corpus.size(), setup.seed);
  Experiment experiment(setup, corpus, holdout_stub(), learner);

  const auto& ledger = experiment.run();
  for (const auto& rec : ledger.iterations) {
    CHECK(rec.waste == 0);
    CHECK(rec.trained_examples == rec.accepted);
  }
}

TEST_CASE("restem run caps duplicates at the cutoff") {
  const Corpus corpus = normal_corpus(60, 26);
  const IterationPolicy policy = policy_from_preset("restem");
  auto setup = desk_setup(policy, 1);
  SyntheticLearner learner(SyntheticParams{}, corpus, corpus.size(), setup.seed);
  Experiment experiment(setup, corpus, holdout_stub(), learner);

  const auto& ledger = experiment.run();
  const auto& rec = ledger.iterations.at(0);
  long max_count = 0;
  for (const auto& [id, count] : rec.trained_counts) max_count = std::max(max_count, count);
  CHECK(max_count <= 3);
  CHECK(rec.attempts == static_cast<long>(corpus.size()) * 11);
  CHECK(rec.waste == 0);
}

TEST_CASE("corpus exhaustion trains on the shortfall batch") {
  const Corpus corpus = normal_corpus(10, 27);  // far smaller than beta^1 = 40
  IterationPolicy policy = policy_from_preset("adastar");
  policy.rationalize = false;
  auto setup = desk_setup(policy, 1);
  SyntheticLearner learner(SyntheticParams{}, corpus, corpus.size(), setup.seed);
  Experiment experiment(setup, corpus, holdout_stub(), learner);

  const auto& ledger = experiment.run();
  const auto& rec = ledger.iterations.at(0);
  CHECK(rec.exhausted);
  CHECK(rec.m == 10);
  CHECK(rec.accepted < rec.beta);
  CHECK(rec.trained == (rec.accepted > 0));
}

TEST_CASE("zero successes records an untrained iteration with alpha 0") {
  // difficulty so high nothing is ever accepted
  std::vector<Observation> obs;
  for (int i = 0; i < 5; ++i) {
    obs.push_back(Observation{i, "q", "a", {{"difficulty", 60.0}}});
  }
  const Corpus corpus("impossible", std::move(obs));
  IterationPolicy policy = policy_from_preset("adastar");
  policy.rationalize = false;
  SyntheticParams params;
  params.hint_boost = 0.0;
  auto setup = desk_setup(policy, 2);
  SyntheticLearner learner(params, corpus, corpus.size(), setup.seed);
  Experiment experiment(setup, corpus, holdout_stub(), learner);

  const auto& ledger = experiment.run();
  for (const auto& rec : ledger.iterations) {
    CHECK_FALSE(rec.trained);
    CHECK(rec.alpha == 0.0);
    CHECK(rec.n_update == 0);  // statistics persist untouched
    CHECK(rec.trained_examples == 0);
  }
}

TEST_CASE("two runs with identical seeds produce identical ledgers") {
  const Corpus corpus = normal_corpus(100, 28);
  const IterationPolicy policy = policy_from_preset("adastar");
  SyntheticLearner l1(SyntheticParams{}, corpus, corpus.size(), 10);
  SyntheticLearner l2(SyntheticParams{}, corpus, corpus.size(), 10);
  const Corpus holdout("h", {{0, "q", "a", {{"difficulty", 0.0}}}});
  Experiment e1(desk_setup(policy, 4), corpus, holdout, l1);
  Experiment e2(desk_setup(policy, 4), corpus, holdout, l2);
  const auto& a = e1.run();
  const auto& b = e2.run();

  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    CHECK(a.iterations[i].sampled_ids == b.iterations[i].sampled_ids);
    CHECK(a.iterations[i].accepted == b.iterations[i].accepted);
    CHECK(a.iterations[i].alpha == b.iterations[i].alpha);
    CHECK(a.iterations[i].eval_accuracy == b.iterations[i].eval_accuracy);
    CHECK(a.iterations[i].inference_tokens == b.iterations[i].inference_tokens);
  }
  CHECK(a.best_iteration == b.best_iteration);
}

TEST_CASE("max_iters bounds the ledger") {
  const Corpus corpus = normal_corpus(30, 29);
  const IterationPolicy policy = policy_from_preset("adastar");
  auto setup = desk_setup(policy, 1);
  SyntheticLearner learner(SyntheticParams{}, corpus, corpus.size(), setup.seed);
  Experiment experiment(setup, corpus, holdout_stub(), learner);
  CHECK(experiment.run().iterations.size() == 1);
}
