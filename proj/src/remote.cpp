#include "adastar/remote.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace adastar {

namespace {

nlohmann::json exemplars_to_json(const std::vector<Exemplar>& exemplars) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : exemplars) {
    arr.push_back({{"question", e.question}, {"cot", e.cot}, {"answer", e.answer}});
  }
  return arr;
}

}  // namespace

RemoteLearner::RemoteLearner(const std::string& base_url, const Corpus& corpus,
                             std::vector<Exemplar> exemplars, RetryPolicy retry,
                             double generation_temperature)
    : base_url_(base_url),
      corpus_(corpus),
      exemplars_(std::move(exemplars)),
      retry_(retry),
      generation_temperature_(generation_temperature),
      client_(std::make_unique<httplib::Client>(base_url)) {
  client_->set_read_timeout(120, 0);
  client_->set_connection_timeout(10, 0);
}

RemoteLearner::~RemoteLearner() = default;

std::optional<std::string> RemoteLearner::post_with_retry(const std::string& path,
                                                          const std::string& body,
                                                          const std::string& request_id) {
  int backoff_ms = retry_.base_backoff_ms;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    if (attempt > 1) {
      ++retries_;
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    auto res = client_->Post(path, body, "application/json");
    if (!res || res->status >= 500) continue;  // transport fault or server error
    if (res->status != 200) {
      throw LearnerError("remote returned status " + std::to_string(res->status) + " on " + path,
                         /*fatal=*/true);
    }
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object()) continue;
    if (!path.ends_with("/reset")) {
      if (!reply.contains("request_id") || reply["request_id"] != request_id) {
        ++echo_mismatches_;  // reject responses for someone else's request
        continue;
      }
    }
    return res->body;
  }
  return std::nullopt;
}

GenerationOutcome RemoteLearner::generate_once(Iter t, ObsId id, const std::string& request_id,
                                               std::optional<std::string_view> hint,
                                               double temperature, bool rationalized) {
  nlohmann::json req;
  req["request_id"] = request_id;
  req["question"] = corpus_.by_id(id).question;
  req["exemplars"] = exemplars_to_json(exemplars_);
  req["hint"] = hint ? nlohmann::json(std::string(*hint)) : nlohmann::json(nullptr);
  req["n"] = 1;
  req["temperature"] = temperature;

  GenerationOutcome out;
  out.rationalized = rationalized;

  const auto body = post_with_retry("/v1/generate", req.dump(), request_id);
  if (!body) return out;  // all attempts failed: observation skipped, hit=false

  const nlohmann::json reply = nlohmann::json::parse(*body);
  if (!reply.contains("completions") || !reply["completions"].is_array() ||
      reply["completions"].empty()) {
    return out;
  }
  const auto& completion = reply["completions"][0];
  out.answer_text = completion.value("answer", "");
  out.cot_text = completion.value("cot", "");
  out.cot_tokens = completion.value("tokens", 0);
  out.hit = answers_match(corpus_.by_id(id).answer, *out.answer_text);
  (void)t;
  return out;
}

GenerationOutcome RemoteLearner::generate(const GenContext& ctx,
                                          std::optional<std::string_view> hint) {
  std::string request_id = "gen-t" + std::to_string(ctx.t) + "-i" + std::to_string(ctx.id) +
                           "-k" + std::to_string(ctx.k);
  if (ctx.rationalized) request_id += "-r";
  return generate_once(ctx.t, ctx.id, request_id, hint, generation_temperature_,
                       ctx.rationalized);
}

TrainReport RemoteLearner::train(std::span<const TrainExample> batch, bool accumulate,
                                 double sampling_alpha) {
  if (batch.empty()) throw std::invalid_argument("train called with empty batch");

  const std::string request_id = "train-" + std::to_string(++train_counter_);
  nlohmann::json req;
  req["request_id"] = request_id;
  req["accumulate"] = accumulate;
  nlohmann::json examples = nlohmann::json::array();
  for (const auto& ex : batch) {
    examples.push_back({{"question", corpus_.by_id(ex.id).question},
                        {"cot", ex.cot},
                        {"answer", ex.answer}});
  }
  req["examples"] = std::move(examples);

  const auto body = post_with_retry("/v1/train", req.dump(), request_id);
  if (!body) {
    throw LearnerError("training request failed after " + std::to_string(retry_.max_attempts) +
                           " attempts",
                       /*fatal=*/true);
  }
  const nlohmann::json reply = nlohmann::json::parse(*body);

  TrainReport report;
  report.alpha = reply.value("alpha", sampling_alpha);
  report.trained_examples = static_cast<long>(batch.size());
  report.trained_tokens = reply.value("tokens", 0LL);
  return report;
}

void RemoteLearner::reset_to_base() {
  const auto body = post_with_retry("/v1/reset", "{}", "");
  if (!body) {
    throw LearnerError("reset request failed; cannot restore base weights", /*fatal=*/true);
  }
}

double RemoteLearner::evaluate(const Corpus& holdout, Iter t) {
  if (holdout.empty()) return 0.0;
  long hits = 0;
  for (const auto& obs : holdout.observations()) {
    const std::string request_id = "eval-t" + std::to_string(t) + "-i" + std::to_string(obs.id);
    // evaluation decodes greedily
    const auto out = generate_once(t, obs.id, request_id, std::nullopt, 0.0, false);
    if (out.hit) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(holdout.size());
}

}  // namespace adastar
