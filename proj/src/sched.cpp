#include "adastar/sched.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace adastar {

bool priority_less(const PriorityKey& a, const PriorityKey& b, PriorityOrder order) {
  switch (order) {
    case PriorityOrder::TimeThenWin:
      if (a.last_sampled != b.last_sampled) return a.last_sampled < b.last_sampled;
      if (a.win != b.win) return a.win < b.win;
      return a.id < b.id;
    case PriorityOrder::WinThenTime:
      if (a.win != b.win) return a.win < b.win;
      if (a.last_sampled != b.last_sampled) return a.last_sampled < b.last_sampled;
      return a.id < b.id;
    case PriorityOrder::TimeOnly:
      if (a.last_sampled != b.last_sampled) return a.last_sampled < b.last_sampled;
      return a.id < b.id;
  }
  return false;
}

CurriculumShape curriculum_shape_from_string(const std::string& name) {
  if (name == "square") return CurriculumShape::Square;
  if (name == "linear") return CurriculumShape::Linear;
  if (name == "cube") return CurriculumShape::Cube;
  if (name == "one") return CurriculumShape::One;
  throw std::invalid_argument("unknown curriculum shape: " + name);
}

const char* to_string(CurriculumShape shape) {
  switch (shape) {
    case CurriculumShape::Square: return "square";
    case CurriculumShape::Linear: return "linear";
    case CurriculumShape::Cube: return "cube";
    case CurriculumShape::One: return "one";
  }
  return "?";
}

std::size_t curriculum_count(std::size_t m, double alpha, CurriculumShape shape) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  double f = 1.0;
  switch (shape) {
    case CurriculumShape::Square: f = alpha * alpha; break;
    case CurriculumShape::Linear: f = alpha; break;
    case CurriculumShape::Cube: f = alpha * alpha * alpha; break;
    case CurriculumShape::One: f = 1.0; break;
  }
  return static_cast<std::size_t>(std::floor(static_cast<double>(m) * f));
}

// ---------------------------------------------------------------------------
// HieMinHeap

HieMinHeap::HieMinHeap(PriorityOrder order) : order_(order) {}

namespace {

// Inner heaps are ordered by (key, id); std heap algorithms build max-heaps,
// so the comparison is inverted.
constexpr auto kInnerGreater = [](const auto& a, const auto& b) {
  if (a.key != b.key) return a.key > b.key;
  return a.id > b.id;
};

}  // namespace

PriorityKey HieMinHeap::make_key(double primary, const InnerEntry& e) const {
  PriorityKey key;
  key.id = e.id;
  switch (order_) {
    case PriorityOrder::TimeThenWin:
      key.last_sampled = static_cast<Iter>(primary);
      key.win = e.key;
      break;
    case PriorityOrder::WinThenTime:
      key.win = primary;
      key.last_sampled = static_cast<Iter>(e.key);
      break;
    case PriorityOrder::TimeOnly:
      key.last_sampled = static_cast<Iter>(primary);
      key.win = 0.0;
      break;
  }
  return key;
}

void HieMinHeap::push(ObsId id, const ObsStats& stats) {
  double primary = 0.0;
  InnerEntry entry;
  entry.id = id;
  switch (order_) {
    case PriorityOrder::TimeThenWin:
      primary = static_cast<double>(stats.last_sampled);
      entry.key = stats.win;
      break;
    case PriorityOrder::WinThenTime:
      primary = stats.win;
      entry.key = static_cast<double>(stats.last_sampled);
      break;
    case PriorityOrder::TimeOnly:
      primary = static_cast<double>(stats.last_sampled);
      entry.key = 0.0;
      break;
  }

  const std::uint64_t bits = std::bit_cast<std::uint64_t>(primary);
  auto it = bucket_pos_.find(bits);
  if (it == bucket_pos_.end()) {
    outer_.push_back(Bucket{primary, {}});
    bucket_pos_[bits] = outer_.size() - 1;
    outer_.back().entries.push_back(entry);
    sift_up(outer_.size() - 1);
  } else {
    auto& entries = outer_[it->second].entries;
    entries.push_back(entry);
    std::push_heap(entries.begin(), entries.end(), kInnerGreater);
  }
  ++size_;
}

PriorityKey HieMinHeap::peek() const {
  if (outer_.empty()) throw std::logic_error("peek on empty HieMinHeap");
  const Bucket& top = outer_.front();
  return make_key(top.key, top.entries.front());
}

PriorityKey HieMinHeap::pop() {
  if (outer_.empty()) throw std::logic_error("pop on empty HieMinHeap");
  Bucket& top = outer_.front();
  const PriorityKey key = make_key(top.key, top.entries.front());

  std::pop_heap(top.entries.begin(), top.entries.end(), kInnerGreater);
  top.entries.pop_back();
  --size_;

  if (top.entries.empty()) {
    bucket_pos_.erase(std::bit_cast<std::uint64_t>(top.key));
    if (outer_.size() > 1) {
      // move the last bucket into the root; the dead bucket must not leave a
      // stale position behind
      outer_[0] = std::move(outer_.back());
      outer_.pop_back();
      bucket_pos_[std::bit_cast<std::uint64_t>(outer_[0].key)] = 0;
      sift_down(0);
    } else {
      outer_.pop_back();
    }
  }
  return key;
}

void HieMinHeap::swap_buckets(std::size_t a, std::size_t b) {
  std::swap(outer_[a], outer_[b]);
  bucket_pos_[std::bit_cast<std::uint64_t>(outer_[a].key)] = a;
  bucket_pos_[std::bit_cast<std::uint64_t>(outer_[b].key)] = b;
}

void HieMinHeap::sift_up(std::size_t pos) {
  while (pos != 0) {
    const std::size_t parent = (pos - 1) / 2;
    if (outer_[parent].key <= outer_[pos].key) break;
    swap_buckets(parent, pos);
    pos = parent;
  }
}

void HieMinHeap::sift_down(std::size_t pos) {
  const std::size_t n = outer_.size();
  while (true) {
    std::size_t smallest = pos;
    const std::size_t l = 2 * pos + 1;
    const std::size_t r = 2 * pos + 2;
    if (l < n && outer_[l].key < outer_[smallest].key) smallest = l;
    if (r < n && outer_[r].key < outer_[smallest].key) smallest = r;
    if (smallest == pos) break;
    swap_buckets(pos, smallest);
    pos = smallest;
  }
}

// ---------------------------------------------------------------------------
// Scheduler

Scheduler::Scheduler(const Corpus& corpus, PriorityOrder order) : heap_(order) {
  index_.reserve(corpus.size());
  for (const auto& obs : corpus.observations()) {
    index_.emplace(obs.id, ObsStats{});
    heap_.push(obs.id, ObsStats{});
  }
}

std::optional<ObsId> Scheduler::peek_next(IterationDraft& draft) {
  if (heap_.empty()) return std::nullopt;  // every id already drawn this iteration
  const PriorityKey key = heap_.pop();     // lazy drain; re-pushed at commit
  draft.sampled_ids.push_back(key.id);
  return key.id;
}

double Scheduler::update_tmp_win(IterationDraft& draft, ObsId id, int k, bool hit) {
  if (k < 1) throw std::invalid_argument("sample index k must be >= 1");
  auto [it, inserted] = draft.sample_counts.emplace(id, 0);
  if (k != it->second + 1) {
    throw std::invalid_argument("non-monotone sample index for id " + std::to_string(id));
  }
  it->second = k;

  double& w = draft.tmp_win[id];
  w = (static_cast<double>(k - 1) / k) * w + (hit ? 1.0 : 0.0) / k;
  return w;
}

void Scheduler::commit_iteration(IterationDraft& draft, Iter t, std::size_t n_update) {
  if (n_update > draft.m()) {
    throw std::invalid_argument("n_update exceeds drawn count m");
  }
  for (std::size_t i = 0; i < draft.sampled_ids.size(); ++i) {
    const ObsId id = draft.sampled_ids[i];
    ObsStats& stored = index_.at(id);
    if (i < n_update) {
      stored.last_sampled = t;
      stored.win = draft.tmp_win.at(id);
    }
    // beyond n_update the stale statistics persist, raising re-selection odds
    heap_.push(id, stored);
  }
  draft = IterationDraft{};
}

std::vector<SchedSnapshotRow> snapshot_rows(const Scheduler& sched, Iter iter) {
  std::vector<SchedSnapshotRow> rows;
  rows.reserve(sched.size());
  for (const auto& [id, st] : sched.all_stats()) {
    rows.push_back(SchedSnapshotRow{iter, id, st.last_sampled, st.win});
  }
  std::sort(rows.begin(), rows.end(),
            [](const SchedSnapshotRow& a, const SchedSnapshotRow& b) { return a.id < b.id; });
  return rows;
}

}  // namespace adastar
