#pragma once

#include <json.hpp>

#include "phiscan/sieve.hpp"

namespace phiscan {

// Batched S(x;m) for m = 1..m_max over one prime enumeration; each entry
// matches s_sum(x, m) bit for bit (same summation order).
struct STableRow {
  std::uint64_t m = 0;
  std::uint64_t phi_m = 0;
  double exact = 0.0;
  double estimate = 0.0;
};
std::vector<STableRow> s_table(std::uint64_t x, std::uint64_t m_max,
                               std::uint64_t sieve_block = 1u << 20);

// Assemble the full scan report. Verifies the streamed falling-factorial
// sums against the g-histogram (exact integer identity) and throws
// InternalError on any mismatch. The report echoes only content-shaping
// config (never segmentation or worker counts), so byte-identical
// accumulators give byte-identical reports.
nlohmann::json build_report(const SegmentAccumulator& acc, const ScanContext& ctx);

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::uint64_t kReportSTableMMax = 50;

}  // namespace phiscan
