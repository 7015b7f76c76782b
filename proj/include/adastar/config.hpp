#ifndef ADASTAR_CONFIG_HPP
#define ADASTAR_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "adastar/engine.hpp"
#include "adastar/synthetic.hpp"

namespace adastar {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fully resolved run description. The JSON snapshot written next to the run
// artifacts reproduces the run byte for byte.
struct RunConfig {
  std::string corpus_path;
  std::string output_dir;

  // policy: preset name plus optional knob overrides
  std::string variant = "adastar";
  std::optional<bool> accumulate;
  std::optional<bool> full_batch;
  std::optional<int> K;
  std::optional<bool> rationalize;
  std::optional<int> cutoff;
  std::string curriculum_shape = "square";
  std::optional<double> alpha_override;
  std::string alpha_source = "sampling";  // or "reported"

  // learner backend
  std::string learner = "synthetic";  // or "remote"
  std::string remote_url;             // env ADASTAR_REMOTE_URL when empty
  SyntheticParams synth;
  double model_params = 3e9;

  // schedule
  int sigma1 = 40;
  int base_batch = 8;
  double growth = 1.2;

  std::uint64_t seed = 10;
  int max_iters = 10;
  double holdout_fraction = 0.2;
  std::optional<std::size_t> corpus_limit;

  IterationPolicy resolve_policy() const;
  ExperimentSetup resolve_setup() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace adastar

#endif
