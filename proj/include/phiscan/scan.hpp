#pragma once

#include <iosfwd>
#include <optional>

#include <json.hpp>

#include "phiscan/sieve.hpp"

namespace phiscan {

struct ScanOutcome {
  SegmentAccumulator acc;
  nlohmann::json report;   // empty when the scan stopped early
  bool completed = false;
  std::uint64_t segments_done = 0;
  std::uint64_t segments_total = 0;
};

// Run the full pipeline: plan -> parallel scan_segment -> in-order merge ->
// report. Segments are folded strictly in index order, so the result is
// bit-identical for any worker count or segment size. If a checkpoint path
// is configured and a matching checkpoint exists, the scan resumes after
// its last completed segment; a mismatching checkpoint is refused.
// `max_segments` (testing aid) stops after that many total completed
// segments, leaving the checkpoint behind for a later resume.
ScanOutcome run_scan(const ScanConfig& cfg, std::ostream* progress = nullptr,
                     std::uint64_t max_segments = 0);

inline constexpr int kCheckpointVersion = 1;

}  // namespace phiscan
