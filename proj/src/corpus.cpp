#include "adastar/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "adastar/rng.hpp"

namespace adastar {

std::optional<double> Observation::difficulty() const {
  if (meta.is_object() && meta.contains("difficulty") && meta["difficulty"].is_number()) {
    return meta["difficulty"].get<double>();
  }
  return std::nullopt;
}

Corpus::Corpus(std::string name, std::vector<Observation> observations)
    : name_(std::move(name)), observations_(std::move(observations)) {
  index_.reserve(observations_.size());
  for (std::size_t pos = 0; pos < observations_.size(); ++pos) {
    const ObsId id = observations_[pos].id;
    if (!index_.emplace(id, pos).second) {
      throw std::invalid_argument("duplicate observation id " + std::to_string(id));
    }
  }
}

const Observation& Corpus::by_id(ObsId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    throw std::out_of_range("unknown observation id " + std::to_string(id));
  }
  return observations_[it->second];
}

std::vector<ObsId> Corpus::ids() const {
  std::vector<ObsId> out;
  out.reserve(observations_.size());
  for (const auto& obs : observations_) out.push_back(obs.id);
  return out;
}

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, std::optional<std::size_t> limit) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path.string());
  }

  std::vector<Observation> observations;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    if (limit && observations.size() >= *limit) break;

    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw ParseError("malformed corpus record", line_number);
    }
    if (!record.contains("question") || !record["question"].is_string()) {
      throw ParseError("missing or non-string `question`", line_number);
    }
    if (!record.contains("answer") || !record["answer"].is_string()) {
      throw ParseError("missing or non-string `answer`", line_number);
    }

    Observation obs;
    obs.id = static_cast<ObsId>(observations.size());
    obs.question = record["question"].get<std::string>();
    obs.answer = canonicalize_answer(record["answer"].get<std::string>());
    if (obs.answer.empty()) {
      throw ParseError("answer is empty after canonicalization", line_number);
    }
    if (record.contains("meta")) obs.meta = record["meta"];

    if (record.contains("id")) {
      if (!record["id"].is_number_integer()) {
        throw ParseError("non-integer `id`", line_number);
      }
      const auto explicit_id = record["id"].get<ObsId>();
      // ids already assigned are exactly 0..pos-1, so any smaller id collides
      if (explicit_id >= 0 && explicit_id < obs.id) {
        throw ParseError("duplicate id " + std::to_string(explicit_id), line_number);
      }
      if (explicit_id != obs.id) {
        throw ParseError("explicit id " + std::to_string(explicit_id) +
                             " does not match file position " + std::to_string(obs.id),
                         line_number);
      }
    }
    observations.push_back(std::move(obs));
  }

  if (observations.empty()) {
    throw std::runtime_error("corpus is empty: " + path.string());
  }
  return Corpus(path.stem().string(), std::move(observations));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write corpus file: " + path.string());
  }
  for (const auto& obs : corpus.observations()) {
    nlohmann::json record;
    record["id"] = obs.id;
    record["question"] = obs.question;
    record["answer"] = obs.answer;
    if (!obs.meta.is_null()) record["meta"] = obs.meta;
    out << record.dump() << '\n';
  }
}

namespace {

bool numeric_answer(const std::string& s) {
  std::size_t i = (s.size() > 1 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i >= s.size() || std::isdigit(static_cast<unsigned char>(s[i])) == 0) return false;
  bool seen_dot = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c)) != 0) continue;
    if (c == ',' && !seen_dot) continue;
    if (c == '.' && !seen_dot) {
      seen_dot = true;
      continue;
    }
    return false;
  }
  return true;
}

}  // namespace

std::string canonicalize_answer(std::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  bool pending_space = false;
  for (const char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      if (!s.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      s.push_back(' ');
      pending_space = false;
    }
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }

  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();

  if (numeric_answer(s)) {
    std::string digits;
    digits.reserve(s.size());
    for (const char c : s) {
      if (c != ',') digits.push_back(c);
    }
    std::size_t start = (digits[0] == '-' || digits[0] == '+') ? 1 : 0;
    std::size_t i = start;
    while (i + 1 < digits.size() && digits[i] == '0' &&
           std::isdigit(static_cast<unsigned char>(digits[i + 1])) != 0) {
      ++i;
    }
    s = digits.substr(0, start) + digits.substr(i);
  }
  return s;
}

bool answers_match(std::string_view gold, std::string_view predicted) {
  return canonicalize_answer(gold) == canonicalize_answer(predicted);
}

std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, double holdout_fraction,
                                        std::uint64_t seed) {
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
    throw std::invalid_argument("holdout_fraction must be in [0, 1)");
  }
  const std::size_t n = corpus.size();
  const auto n_holdout = static_cast<std::size_t>(static_cast<double>(n) * holdout_fraction);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RngStream rng = substream(seed, StreamTag::HoldoutSplit);
  shuffle(order, rng);

  std::vector<bool> held(n, false);
  for (std::size_t i = 0; i < n_holdout; ++i) held[order[i]] = true;

  std::vector<Observation> train, holdout;
  for (std::size_t i = 0; i < n; ++i) {
    (held[i] ? holdout : train).push_back(corpus.at(i));
  }
  return {Corpus(corpus.name() + ".train", std::move(train)),
          Corpus(corpus.name() + ".holdout", std::move(holdout))};
}

}  // namespace adastar
