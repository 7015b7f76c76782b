#ifndef ADASTAR_LEARNER_HPP
#define ADASTAR_LEARNER_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adastar/corpus.hpp"
#include "adastar/sched.hpp"

namespace adastar {

// Identifies one CoT sample draw; backends derive their randomness (or their
// request ids) from it, so outcomes are independent of evaluation order.
struct GenContext {
  Iter t = 1;
  ObsId id = 0;
  int k = 1;
  bool rationalized = false;
};

struct GenerationOutcome {
  bool hit = false;
  bool rationalized = false;
  int cot_tokens = 0;
  std::optional<std::string> answer_text;  // extracted answer (remote backend)
  std::optional<std::string> cot_text;     // generated CoT (remote backend)
};

struct TrainExample {
  ObsId id = 0;
  int cot_tokens = 0;
  bool rationalized = false;
  std::string cot;
  std::string answer;
};

struct TrainReport {
  double alpha = 0.0;  // training-accuracy proxy
  long trained_examples = 0;
  long trained_tokens = 0;
};

// Transient remote faults exhaust their retries before surfacing; fatal ones
// abort the run.
struct LearnerError : std::runtime_error {
  LearnerError(const std::string& msg, bool fatal_error)
      : std::runtime_error(msg), fatal(fatal_error) {}
  bool fatal;
};

// The generate/verify/train cycle behind one interface. Implementations must
// be deterministic given (seed, corpus, policy).
class LearnerBackend {
 public:
  virtual ~LearnerBackend() = default;

  virtual GenerationOutcome generate(const GenContext& ctx,
                                     std::optional<std::string_view> hint) = 0;

  // sampling_alpha is the engine-computed share of accepted generations this
  // iteration; backends without their own accuracy notion report it back.
  // accumulate=false restores the base state before applying the batch.
  virtual TrainReport train(std::span<const TrainExample> batch, bool accumulate,
                            double sampling_alpha) = 0;

  virtual void reset_to_base() = 0;

  // Held-out accuracy at iteration t (greedy / one draw per item).
  virtual double evaluate(const Corpus& holdout, Iter t) = 0;

  // True when generate() may be called from parallel loops.
  virtual bool parallel_generation_safe() const { return false; }
};

}  // namespace adastar

#endif
