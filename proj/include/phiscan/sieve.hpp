#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phiscan/arith.hpp"
#include "phiscan/stats.hpp"

namespace phiscan {

struct ScanConfig {
  std::uint64_t x = 0;
  std::uint64_t segment_size = 1u << 16;
  std::uint32_t basis_limit = 97;
  std::vector<double> lambdas = {0.5, 1.0, 2.0};
  std::vector<std::uint32_t> r_values = {1, 2};
  bool emit_per_n = false;
  std::string per_n_path;
  std::string checkpoint_path;
  unsigned workers = 0;  // 0 = hardware concurrency

  void validate() const;
  // floor(x^(1/log3 x)), capped at x (primes dividing n never exceed x).
  std::uint64_t tilde_cutoff() const;
  // Hash of everything that shapes accumulator contents (not segmentation).
  std::uint64_t fingerprint() const;
  // Adds the segment size: checkpoints are only resumable on the same grid.
  std::uint64_t checkpoint_fingerprint() const;
};

// Everything a segment scan needs, derived once from the config.
struct ScanContext {
  ScanConfig cfg;
  PrimeBasis basis;
  Thresholds thr;
  std::uint64_t tilde_cutoff = 0;
  std::uint64_t sqrt_x = 0;

  std::vector<std::uint64_t> base_primes;  // primes <= sqrt(x)
  std::vector<ValuationVec> base_pm1;      // valuations of p-1 per base prime
  std::vector<std::uint8_t> base_v2pm1;    // v2(p-1) per base prime
  std::vector<std::uint8_t> base_bidx;     // basis index of p, or 255
  // Exact-division magic (inverse mod 2^64 and UINT64_MAX/p) per odd prime;
  // index 0 entries are unused placeholders for p = 2.
  std::vector<std::uint64_t> base_inv, base_thr;
  std::vector<std::uint64_t> basis_inv, basis_thr;

  // Per-lambda prime-index cutoffs for f/g, per (lambda, r) for f_r.
  std::vector<std::size_t> f_cut;
  std::size_t g_lo = 0;
  std::vector<std::size_t> g_cut;
  std::vector<std::vector<std::size_t>> fr_cut;

  // legendre_vec[k] = valuation vector of k! over the basis, k <= basis limit.
  std::vector<ValuationVec> legendre_vec;
  // k0_from_v2 tabulated for v = 0..255.
  std::vector<std::uint32_t> k0_table;
  // Segment-monotone breakpoints of round(log3 n / log 2): (first_n, value).
  std::vector<std::pair<std::uint64_t, std::int32_t>> dev_breaks;

  explicit ScanContext(const ScanConfig& cfg);

  std::uint32_t largest_k(const ValuationVec& v) const;
  std::int32_t dev_target(std::uint64_t n) const;  // n >= 16
};

struct ScanRecord {
  std::uint64_t n = 0;
  ValuationVec phi_vec;
  ValuationVec tilde_vec;
  ValuationVec lambda_vec;
  std::uint8_t v2_lambda = 0;
  std::uint32_t pr = 0;  // 0 = none (phi(n) odd)
  std::uint32_t k_phi = 1;
  std::uint32_t k_lambda = 1;
};

// Mergeable statistics over a set of scanned n. All fields are exact
// integers, so merging is associative and commutative bit-for-bit.
struct SegmentAccumulator {
  std::uint64_t fingerprint = 0;
  std::uint64_t count = 0;

  std::vector<Histogram> f_hist;   // per lambda
  std::vector<Histogram> g_hist;   // per lambda
  std::vector<Histogram> fr_hist;  // flattened lambda-major [i_lambda * nr + i_r]
  std::vector<std::uint64_t> fg_disagree;             // per lambda
  std::vector<std::array<std::uint64_t, 3>> g_fall;   // per lambda, r = 1..3

  std::uint64_t k_lambda_odd = 0;
  std::uint64_t k_phi_even = 0;
  std::uint64_t kphi_pred_match = 0;  // k_phi == next_prime(pr) - 1
  std::map<std::int32_t, std::uint64_t> klambda_dev;  // k_lambda - round(log3 n/log 2)
  std::uint64_t dev_count = 0;                        // n >= 16 only

  Histogram v2max_hist;               // max v2(p-1) over p | n
  std::uint64_t lemma_v2_match = 0;   // v2(lambda) == max v2(p-1) over p | n
  std::uint64_t lemma_k0_match = 0;   // k_lambda == k0_from_v2(v2(lambda))

  std::uint64_t mark_ops = 0;  // inner-loop work counter (regression guard)

  SegmentAccumulator() = default;
  explicit SegmentAccumulator(const ScanContext& ctx);
  void merge(const SegmentAccumulator& o);
  bool operator==(const SegmentAccumulator&) const = default;
};

// All primes <= limit, increasing (simple sieve).
std::vector<std::uint64_t> base_primes(std::uint64_t limit);

// Half-open ranges of length <= segment_size exactly covering [1, x].
std::vector<std::pair<std::uint64_t, std::uint64_t>> plan_segments(std::uint64_t x,
                                                                   std::uint64_t segment_size);

// Valuations of l-1 over the basis; the zero vector for l = 2.
ValuationVec pminus1_valuations(std::uint64_t ell, const PrimeBasis& basis);

// Memo for pminus1_valuations: a dense precomputed table for the base
// primes (immutable after construction, shared freely across workers)
// with direct computation beyond it.
class PMinus1Memo {
 public:
  PMinus1Memo(const std::vector<std::uint64_t>& primes, const PrimeBasis& basis);
  const ValuationVec& lookup(std::size_t prime_index) const { return table_[prime_index]; }

 private:
  std::vector<ValuationVec> table_;
};

// Scan [lo, hi): factor every n by marking base-prime multiples plus the
// single leftover prime > sqrt(x), build the three valuation vectors, and
// fold all statistics. Appends per-n records when `records` is given.
SegmentAccumulator scan_segment(std::uint64_t lo, std::uint64_t hi, const ScanContext& ctx,
                                std::vector<ScanRecord>* records = nullptr);

}  // namespace phiscan
