#ifndef ADASTAR_ARTIFACTS_HPP
#define ADASTAR_ARTIFACTS_HPP

#include <filesystem>
#include <string>

#include "adastar/metrics.hpp"

namespace adastar {

// Deterministic text formatting shared by every export; identical runs must
// produce identical bytes.
std::string format_double(double v);

// Writes curve.csv, flops.csv, sd_summary.csv, freq_<a>_<b>.csv,
// quartiles.csv, sched_snapshots.csv and summary.jsonl into out_dir.
// The run label and seed end up in summary.jsonl.
void write_run_artifacts(const MetricsLedger& ledger, const std::filesystem::path& out_dir,
                         const std::string& run_label, std::uint64_t seed);

}  // namespace adastar

#endif
