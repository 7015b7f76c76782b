#include <doctest.h>

#include "adastar/engine.hpp"
#include "adastar/remote.hpp"
#include "adastar/stub_server.hpp"

using namespace adastar;

namespace {

// questions end with the gold answer so the stub can be "correct"
Corpus echo_corpus(int n) {
  std::vector<Observation> obs;
  for (int i = 0; i < n; ++i) {
    const std::string answer = std::to_string(100 + i);
    obs.push_back(Observation{i, "respond with token " + answer, answer, {}});
  }
  return Corpus("echo", std::move(obs));
}

RetryPolicy fast_retry() { return RetryPolicy{3, 50}; }

}  // namespace

TEST_CASE("generate round-trip verifies answers via canonical equality") {
  StubServer server({.seed = 7, .correct_rate = 1.0});
  server.start();
  const Corpus corpus = echo_corpus(4);
  RemoteLearner learner(server.base_url(), corpus, {}, fast_retry());

  const auto out = learner.generate(GenContext{1, 2, 1, false}, std::nullopt);
  CHECK(out.hit);
  CHECK(out.cot_tokens > 0);
  REQUIRE(out.answer_text.has_value());
  CHECK(*out.answer_text == "102");
  CHECK(learner.echo_mismatches() == 0);
}

TEST_CASE("hinted generation returns the hint as the answer") {
  StubServer server({.seed = 7, .correct_rate = 0.0});
  server.start();
  const Corpus corpus = echo_corpus(2);
  RemoteLearner learner(server.base_url(), corpus, {}, fast_retry());

  const auto miss = learner.generate(GenContext{1, 0, 1, false}, std::nullopt);
  CHECK_FALSE(miss.hit);
  const auto hinted = learner.generate(GenContext{1, 0, 1, true}, "100");
  CHECK(hinted.hit);
  CHECK(hinted.rationalized);
}

TEST_CASE("a transient fault is retried and the run proceeds") {
  StubServer server({.seed = 7, .correct_rate = 1.0, .fail_nth_request = 2});
  server.start();
  const Corpus corpus = echo_corpus(3);
  RemoteLearner learner(server.base_url(), corpus, {}, fast_retry());

  CHECK(learner.generate(GenContext{1, 0, 1, false}, std::nullopt).hit);
  CHECK(learner.generate(GenContext{1, 1, 1, false}, std::nullopt).hit);  // hits the fault
  CHECK(server.faults_injected() == 1);
  CHECK(learner.retries_performed() >= 1);
}

TEST_CASE("responses with a foreign request id are rejected") {
  StubServer server({.seed = 7, .correct_rate = 1.0, .corrupt_echo = true});
  server.start();
  const Corpus corpus = echo_corpus(1);
  RemoteLearner learner(server.base_url(), corpus, {}, RetryPolicy{3, 10});

  const auto out = learner.generate(GenContext{1, 0, 1, false}, std::nullopt);
  CHECK_FALSE(out.hit);  // every attempt rejected, observation skipped
  CHECK(learner.echo_mismatches() == 3);
}

TEST_CASE("train posts examples and relays the reported alpha") {
  StubServer server({.seed = 7});
  server.start();
  const Corpus corpus = echo_corpus(3);
  RemoteLearner learner(server.base_url(), corpus, {}, fast_retry());

  std::vector<TrainExample> batch{TrainExample{0, 12, false, "cot text", "100"},
                                  TrainExample{1, 9, false, "more cot", "101"}};
  const auto report = learner.train(batch, true, 0.5);
  CHECK(report.trained_examples == 2);
  CHECK(report.alpha == doctest::Approx(0.32));
  CHECK(report.trained_tokens > 0);
  CHECK(server.train_requests() == 1);
}

TEST_CASE("reset reaches the server") {
  StubServer server({.seed = 7});
  server.start();
  const Corpus corpus = echo_corpus(1);
  RemoteLearner learner(server.base_url(), corpus, {}, fast_retry());
  learner.reset_to_base();
  CHECK(server.reset_requests() == 1);
}

TEST_CASE("unreachable server: generation skips, training is fatal") {
  const Corpus corpus = echo_corpus(1);
  RemoteLearner learner("http://127.0.0.1:1", corpus, {}, RetryPolicy{2, 10});

  const auto out = learner.generate(GenContext{1, 0, 1, false}, std::nullopt);
  CHECK_FALSE(out.hit);  // skipped with hit=false after retries

  std::vector<TrainExample> batch{TrainExample{0, 5, false, "", "100"}};
  CHECK_THROWS_AS(learner.train(batch, true, 0.5), LearnerError);
  CHECK_THROWS_AS(learner.reset_to_base(), LearnerError);
}

TEST_CASE("two-iteration run against the stub server completes") {
  StubServer server({.seed = 11, .correct_rate = 0.7, .fail_nth_request = 5});
  server.start();
  const Corpus full = echo_corpus(24);
  const auto [train, holdout] = split_holdout(full, 0.25, 10);
  // the learner sees the full corpus so evaluation can resolve holdout ids
  RemoteLearner learner(server.base_url(), full, {}, fast_retry());

  ExperimentSetup setup;
  setup.policy = policy_from_preset("star-acc");
  setup.schedule = BatchSchedule{1, 4, 1.2};  // beta^1 = 4
  setup.max_iters = 2;
  setup.seed = 10;

  Experiment experiment(setup, train, holdout, learner);
  const auto& ledger = experiment.run();

  CHECK_FALSE(experiment.fatal_error().has_value());
  REQUIRE(ledger.iterations.size() == 2);
  CHECK(server.faults_injected() == 1);
  CHECK(learner.retries_performed() >= 1);
  CHECK(learner.echo_mismatches() == 0);
  for (const auto& rec : ledger.iterations) {
    CHECK(rec.attempts >= static_cast<long>(train.size()));
  }
}
