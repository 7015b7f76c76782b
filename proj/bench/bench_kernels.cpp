// Times the OpenMP generation-sweep and evaluation kernels against their
// serial references and checks they agree. Build and run:
//   cmake --build build --target bench_kernels && ./build/bench/bench_kernels

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "adastar/engine.hpp"
#include "adastar/synthetic.hpp"

using namespace adastar;

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

long checksum(const std::vector<std::vector<GenerationOutcome>>& outcomes) {
  long sum = 0;
  for (const auto& per_id : outcomes) {
    for (const auto& out : per_id) sum += out.cot_tokens + (out.hit ? 1 : 0);
  }
  return sum;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; parallel kernels fall back to serial\n");
#endif

  std::printf("%-28s %10s %12s %12s %9s\n", "kernel", "n", "serial ms", "parallel ms",
              "speedup");

  const IterationPolicy policy = policy_from_preset("star-acc-full-k");  // K = 5
  for (const int n : {2000, 10000, 50000}) {
    const Corpus corpus = make_synthetic_corpus(n, DifficultySpec{}, 10);
    SyntheticLearner learner(SyntheticParams{}, corpus, corpus.size(), 10);
    const auto ids = corpus.ids();

    auto start = std::chrono::steady_clock::now();
    const auto serial = sweep_outcomes(learner, corpus, ids, 1, policy, false);
    const double serial_ms = ms_since(start);

    start = std::chrono::steady_clock::now();
    const auto parallel = sweep_outcomes(learner, corpus, ids, 1, policy, true);
    const double parallel_ms = ms_since(start);

    if (checksum(serial) != checksum(parallel)) {
      std::printf("MISMATCH: parallel sweep diverges from serial at n=%d\n", n);
      return 1;
    }
    std::printf("%-28s %10d %12.2f %12.2f %8.2fx\n", "generation sweep (K=5)", n, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
  }

  for (const int n : {10000, 100000}) {
    const Corpus corpus = make_synthetic_corpus(n, DifficultySpec{}, 10);
    SyntheticLearner learner(SyntheticParams{}, corpus, corpus.size(), 10);

    auto start = std::chrono::steady_clock::now();
    const double serial_acc = learner.evaluate_serial(corpus, 1);
    const double serial_ms = ms_since(start);

    start = std::chrono::steady_clock::now();
    const double parallel_acc = learner.evaluate(corpus, 1);
    const double parallel_ms = ms_since(start);

    if (serial_acc != parallel_acc) {
      std::printf("MISMATCH: parallel evaluate diverges from serial at n=%d\n", n);
      return 1;
    }
    std::printf("%-28s %10d %12.2f %12.2f %8.2fx\n", "holdout evaluation", n, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
  }

  std::printf("parallel kernels match serial references\n");
  return 0;
}
