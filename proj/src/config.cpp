#include "adastar/config.hpp"

#include <fstream>

namespace adastar {

IterationPolicy RunConfig::resolve_policy() const {
  IterationPolicy p;
  try {
    p = policy_from_preset(variant);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (accumulate) p.accumulate = *accumulate;
  if (full_batch) p.full_batch = *full_batch;
  if (K) p.K = *K;
  if (rationalize) p.rationalize = *rationalize;
  if (cutoff) p.restem_cutoff = *cutoff;
  p.alpha_override = alpha_override;
  try {
    p.curriculum_shape = curriculum_shape_from_string(curriculum_shape);
    validate_policy(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

ExperimentSetup RunConfig::resolve_setup() const {
  ExperimentSetup setup;
  setup.policy = resolve_policy();
  setup.schedule = BatchSchedule{sigma1, base_batch, growth};
  setup.seed = seed;
  setup.max_iters = max_iters;
  setup.model_params = model_params;
  if (alpha_source == "sampling") {
    setup.alpha_source = AlphaSource::SamplingRate;
  } else if (alpha_source == "reported") {
    setup.alpha_source = AlphaSource::LearnerReported;
  } else {
    throw ConfigError("alpha_source must be `sampling` or `reported`");
  }
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (learner != "synthetic" && learner != "remote") {
    throw ConfigError("learner must be `synthetic` or `remote`");
  }
  return setup;
}

namespace {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  read_opt(j, "corpus_path", c.corpus_path);
  read_opt(j, "output_dir", c.output_dir);
  read_opt(j, "variant", c.variant);
  read_optional(j, "accumulate", c.accumulate);
  read_optional(j, "full_batch", c.full_batch);
  read_optional(j, "K", c.K);
  read_optional(j, "rationalize", c.rationalize);
  read_optional(j, "cutoff", c.cutoff);
  read_opt(j, "curriculum_shape", c.curriculum_shape);
  read_optional(j, "alpha_override", c.alpha_override);
  read_opt(j, "alpha_source", c.alpha_source);
  read_opt(j, "learner", c.learner);
  read_opt(j, "remote_url", c.remote_url);
  read_opt(j, "model_params", c.model_params);
  read_opt(j, "sigma1", c.sigma1);
  read_opt(j, "base_batch", c.base_batch);
  read_opt(j, "growth", c.growth);
  read_opt(j, "seed", c.seed);
  read_opt(j, "max_iters", c.max_iters);
  read_opt(j, "holdout_fraction", c.holdout_fraction);
  read_optional(j, "corpus_limit", c.corpus_limit);
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    read_opt(s, "eta_global", c.synth.eta_global);
    read_opt(s, "eta_obs", c.synth.eta_obs);
    read_opt(s, "slope", c.synth.slope);
    read_opt(s, "hint_boost", c.synth.hint_boost);
    read_opt(s, "cot_min_tokens", c.synth.cot_min_tokens);
    read_opt(s, "cot_max_tokens", c.synth.cot_max_tokens);
  }
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["corpus_path"] = c.corpus_path;
  j["output_dir"] = c.output_dir;
  j["variant"] = c.variant;
  if (c.accumulate) j["accumulate"] = *c.accumulate;
  if (c.full_batch) j["full_batch"] = *c.full_batch;
  if (c.K) j["K"] = *c.K;
  if (c.rationalize) j["rationalize"] = *c.rationalize;
  if (c.cutoff) j["cutoff"] = *c.cutoff;
  j["curriculum_shape"] = c.curriculum_shape;
  if (c.alpha_override) j["alpha_override"] = *c.alpha_override;
  j["alpha_source"] = c.alpha_source;
  j["learner"] = c.learner;
  if (!c.remote_url.empty()) j["remote_url"] = c.remote_url;
  j["model_params"] = c.model_params;
  j["sigma1"] = c.sigma1;
  j["base_batch"] = c.base_batch;
  j["growth"] = c.growth;
  j["seed"] = c.seed;
  j["max_iters"] = c.max_iters;
  j["holdout_fraction"] = c.holdout_fraction;
  if (c.corpus_limit) j["corpus_limit"] = *c.corpus_limit;
  j["synthetic"] = {{"eta_global", c.synth.eta_global}, {"eta_obs", c.synth.eta_obs},
                    {"slope", c.synth.slope},           {"hint_boost", c.synth.hint_boost},
                    {"cot_min_tokens", c.synth.cot_min_tokens},
                    {"cot_max_tokens", c.synth.cot_max_tokens}};
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  return config_from_json(j);
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config snapshot: " + path.string());
  out << config_to_json(config).dump(2) << '\n';
}

}  // namespace adastar
