#ifndef ADASTAR_SCHED_HPP
#define ADASTAR_SCHED_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "adastar/corpus.hpp"

namespace adastar {

using Iter = int;

// Per-observation sampling statistics. last_sampled = 0 is the virtual
// pre-training iteration; real iterations start at 1.
struct ObsStats {
  Iter last_sampled = 0;
  double win = 0.0;
};

struct PriorityKey {
  Iter last_sampled = 0;
  double win = 0.0;
  ObsId id = 0;
};

enum class PriorityOrder {
  TimeThenWin,  // least recently sampled first, then hardest (lowest win)
  WinThenTime,  // priority-flipped ablation: hardest first, then least recent
  TimeOnly,     // plain min-heap ablation: last-sampled only
};

// Strict total order; id breaks all remaining ties so pop sequences are
// reproducible.
bool priority_less(const PriorityKey& a, const PriorityKey& b,
                   PriorityOrder order = PriorityOrder::TimeThenWin);

enum class CurriculumShape { Square, Linear, Cube, One };

CurriculumShape curriculum_shape_from_string(const std::string& name);
const char* to_string(CurriculumShape shape);

// floor(m * f(alpha)); alpha outside [0,1] is a contract violation.
std::size_t curriculum_count(std::size_t m, double alpha,
                             CurriculumShape shape = CurriculumShape::Square);

// Two-level min-heap: an outer heap over distinct primary keys, each bucket
// holding an inner heap over the secondary key with id tiebreak.
class HieMinHeap {
 public:
  explicit HieMinHeap(PriorityOrder order = PriorityOrder::TimeThenWin);

  void push(ObsId id, const ObsStats& stats);
  PriorityKey peek() const;
  PriorityKey pop();
  bool empty() const { return outer_.empty(); }
  std::size_t size() const { return size_; }
  PriorityOrder order() const { return order_; }

 private:
  struct InnerEntry {
    double key = 0.0;  // secondary priority component
    ObsId id = 0;
  };
  struct Bucket {
    double key = 0.0;  // primary priority component
    std::vector<InnerEntry> entries;  // binary min-heap
  };

  PriorityKey make_key(double primary, const InnerEntry& e) const;
  void sift_up(std::size_t pos);
  void sift_down(std::size_t pos);
  void swap_buckets(std::size_t a, std::size_t b);

  PriorityOrder order_;
  std::vector<Bucket> outer_;  // binary min-heap of buckets by primary key
  std::unordered_map<std::uint64_t, std::size_t> bucket_pos_;  // key bits -> slot
  std::size_t size_ = 0;
};

// Ids drawn this iteration, in draw order, plus their running win estimates.
struct IterationDraft {
  std::vector<ObsId> sampled_ids;
  std::unordered_map<ObsId, double> tmp_win;
  std::unordered_map<ObsId, int> sample_counts;  // running k per id

  std::size_t m() const { return sampled_ids.size(); }
};

// Owns the heap and the stats index for one run. peek_next drains the top
// entry into the draft; commit_iteration re-pushes everything, updating only
// the first n_update drawn ids.
class Scheduler {
 public:
  Scheduler(const Corpus& corpus, PriorityOrder order = PriorityOrder::TimeThenWin);

  // Highest-priority id not yet drawn this iteration; nullopt once the corpus
  // is exhausted.
  std::optional<ObsId> peek_next(IterationDraft& draft);

  // Running mean over unaided samples: w_tmp <- ((k-1)/k) w_tmp + hit/k.
  // k must advance by exactly 1 per id, starting at 1.
  double update_tmp_win(IterationDraft& draft, ObsId id, int k, bool hit);

  // First n_update drawn ids (draw order) get last_sampled=t and their tmp
  // win; the rest keep their stored statistics bit for bit.
  void commit_iteration(IterationDraft& draft, Iter t, std::size_t n_update);

  const ObsStats& stats(ObsId id) const { return index_.at(id); }
  std::size_t size() const { return index_.size(); }
  const std::unordered_map<ObsId, ObsStats>& all_stats() const { return index_; }

 private:
  HieMinHeap heap_;
  std::unordered_map<ObsId, ObsStats> index_;
};

struct SchedSnapshotRow {
  Iter iter;
  ObsId id;
  Iter last_sampled;
  double win;
};

// Rows for one iteration, sorted by id (heap-visualization export).
std::vector<SchedSnapshotRow> snapshot_rows(const Scheduler& sched, Iter iter);

}  // namespace adastar

#endif
