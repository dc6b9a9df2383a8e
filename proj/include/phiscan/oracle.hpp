#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace phiscan {

struct ScanRecord;
struct ScanContext;

namespace oracle {

// Deliberately naive reference implementations. Nothing here shares
// arithmetic with the engine: factorials are multiplied out as big
// integers, divisibility is tested by division, phi counts gcds.

inline constexpr std::uint64_t kBrutePhiCeiling = 1'000'000;
inline constexpr std::uint64_t kBruteLambdaCeiling = 100'000;
inline constexpr std::uint64_t kReferenceCeiling = 10'000'000;

// #{1 <= a <= n : gcd(a, n) = 1}, no factorization.
std::uint64_t brute_phi(std::uint64_t n);

// Exponent of the unit group mod n as the lcm of element orders.
std::uint64_t brute_lambda(std::uint64_t n);

// Largest k with k! | phi(n) ('p') or k! | lambda(n) ('l'), multiplying
// out k! exactly.
std::uint32_t brute_k_factorial(std::uint64_t n, char which);

// Primes p <= y with phi(n) not divisible by p.
std::uint32_t brute_f(std::uint64_t n, double y);

// Full per-n reference built from an independent trial-division path:
// phi/lambda as plain values, valuations by repeated division, primorial
// and factorial divisibility through big integers.
struct ReferenceRecord {
  std::uint64_t n = 0;
  std::uint64_t phi = 0;
  std::uint64_t lambda = 0;
  std::uint64_t phi_tilde = 0;
  std::vector<std::uint32_t> phi_vals;     // per basis prime
  std::vector<std::uint32_t> tilde_vals;
  std::vector<std::uint32_t> lambda_vals;
  std::uint32_t v2_lambda = 0;
  std::optional<std::uint32_t> pr;
  std::uint32_t k_phi = 1;
  std::uint32_t k_lambda = 1;
  std::vector<std::uint32_t> f;  // per configured lambda
  std::vector<std::uint32_t> g;
};

class ReferenceScanner {
 public:
  // Same inputs as the engine (bound, basis limit, lambda grid); all
  // derived quantities are recomputed internally.
  ReferenceScanner(std::uint64_t x, std::uint32_t basis_limit,
                   const std::vector<double>& lambdas);

  ReferenceRecord record(std::uint64_t n) const;

  const std::vector<std::uint32_t>& basis_primes() const { return basis_primes_; }

 private:
  std::uint64_t x_;
  std::uint64_t tilde_cutoff_;
  std::vector<std::uint32_t> basis_primes_;
  double a0_;
  std::vector<double> y_;  // per lambda
};

// First divergence between an engine record and the reference, if any.
std::optional<std::string> compare_record(const ScanRecord& engine, const ReferenceRecord& ref,
                                          const ScanContext& ctx);

}  // namespace oracle
}  // namespace phiscan
