#ifndef ADASTAR_REMOTE_HPP
#define ADASTAR_REMOTE_HPP

#include <memory>
#include <string>
#include <vector>

#include "adastar/learner.hpp"

namespace httplib {
class Client;
}

namespace adastar {

struct RetryPolicy {
  int max_attempts = 3;
  int base_backoff_ms = 1000;  // doubles per failed attempt
};

// Drives a remote inference/training server over the line-oriented JSON
// protocol (/v1/generate, /v1/train, /v1/reset). Every response must echo the
// request id; a mismatch counts as a failed attempt.
class RemoteLearner : public LearnerBackend {
 public:
  RemoteLearner(const std::string& base_url, const Corpus& corpus,
                std::vector<Exemplar> exemplars, RetryPolicy retry = {},
                double generation_temperature = 1.0);
  ~RemoteLearner() override;

  GenerationOutcome generate(const GenContext& ctx,
                             std::optional<std::string_view> hint) override;
  TrainReport train(std::span<const TrainExample> batch, bool accumulate,
                    double sampling_alpha) override;
  void reset_to_base() override;
  double evaluate(const Corpus& holdout, Iter t) override;

  long retries_performed() const { return retries_; }
  long echo_mismatches() const { return echo_mismatches_; }

 private:
  // nullopt after all attempts fail; `fatal` controls what the caller does then
  std::optional<std::string> post_with_retry(const std::string& path, const std::string& body,
                                             const std::string& request_id);

  GenerationOutcome generate_once(Iter t, ObsId id, const std::string& request_id,
                                  std::optional<std::string_view> hint, double temperature,
                                  bool rationalized);

  std::string base_url_;
  const Corpus& corpus_;
  std::vector<Exemplar> exemplars_;
  RetryPolicy retry_;
  double generation_temperature_;
  std::unique_ptr<httplib::Client> client_;
  long train_counter_ = 0;
  long retries_ = 0;
  long echo_mismatches_ = 0;
};

}  // namespace adastar

#endif
