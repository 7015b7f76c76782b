#ifndef ADASTAR_CORPUS_HPP
#define ADASTAR_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace adastar {

using ObsId = std::int64_t;

// One supervised example. ids are assigned on load and never reassigned.
struct Observation {
  ObsId id = 0;
  std::string question;
  std::string answer;  // canonical form, see canonicalize_answer
  nlohmann::json meta; // opaque annotations, e.g. meta["difficulty"]

  std::optional<double> difficulty() const;
};

struct Exemplar {
  std::string question;
  std::string cot;
  std::string answer;
};

class Corpus {
 public:
  Corpus() = default;
  Corpus(std::string name, std::vector<Observation> observations);

  const std::string& name() const { return name_; }
  std::size_t size() const { return observations_.size(); }
  bool empty() const { return observations_.empty(); }
  const std::vector<Observation>& observations() const { return observations_; }
  const Observation& at(std::size_t pos) const { return observations_[pos]; }

  const Observation& by_id(ObsId id) const;
  std::vector<ObsId> ids() const;

 private:
  std::string name_;
  std::vector<Observation> observations_;
  std::unordered_map<ObsId, std::size_t> index_;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
  std::size_t line_number;
};

// Line-delimited JSON records with fields question, answer, optional meta and
// optional explicit id (validated against file position).
Corpus load_corpus(const std::filesystem::path& path,
                   std::optional<std::size_t> limit = std::nullopt);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Total and idempotent. Trims, collapses whitespace runs, lowercases, strips
// trailing periods; numeric answers also lose commas and leading zeros.
std::string canonicalize_answer(std::string_view raw);

bool answers_match(std::string_view gold, std::string_view predicted);

// Deterministic seeded partition into (train, holdout). Original ids are kept.
std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, double holdout_fraction,
                                        std::uint64_t seed);

}  // namespace adastar

#endif
