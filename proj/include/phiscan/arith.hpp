#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "phiscan/errors.hpp"

namespace phiscan {

// Prime-power factorization of a positive 64-bit integer.
// Primes strictly increasing, exponents >= 1; the empty list is 1.
struct Factorization {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> factors;

  bool operator==(const Factorization&) const = default;
  // Reconstructed product; throws InternalError if it leaves 64 bits.
  std::uint64_t value() const;
};

// The fixed small-prime basis used for valuation vectors. Defaults to all
// primes <= 97 (25 primes). Capped at 32 primes so vectors stay inline.
class PrimeBasis {
 public:
  static constexpr std::size_t kMaxPrimes = 32;

  explicit PrimeBasis(std::uint32_t limit = 97);

  std::uint32_t limit() const { return limit_; }
  std::size_t size() const { return primes_.size(); }
  std::uint32_t prime(std::size_t i) const { return primes_[i]; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  std::optional<std::size_t> index_of(std::uint32_t p) const;
  // Number of basis primes p with (double)p <= y. Negative y gives 0.
  std::size_t count_leq(double y) const;

 private:
  std::uint32_t limit_;
  std::vector<std::uint32_t> primes_;
};

// Exponent vector over the basis primes: e[i] = v_{p_i}(m). Entries past
// the basis size are zero. Byte-sized exponents suffice for 64-bit inputs.
struct ValuationVec {
  alignas(32) std::array<std::uint8_t, PrimeBasis::kMaxPrimes> e{};

  void add(const ValuationVec& o) {
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<std::uint8_t>(e[i] + o.e[i]);
  }
  void max_with(const ValuationVec& o) {
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = e[i] > o.e[i] ? e[i] : o.e[i];
  }
  bool leq(const ValuationVec& o) const {
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > o.e[i]) return false;
    return true;
  }
  bool operator==(const ValuationVec&) const = default;
};

// Largest v with p^v | m. Rejects m = 0 and non-prime p.
std::uint32_t valuation(std::uint64_t m, std::uint64_t p);

// Trial division by sieved primes up to sqrt(m). Rejects m = 0.
Factorization factorize(std::uint64_t m);

// phi(n) = prod l^(a-1) (l-1) over l^a || n, as a factorization.
Factorization euler_phi(const Factorization& f);

// lambda(n) = lcm of lambda over prime-power components:
// lambda(p^a) = phi(p^a) for p > 2 or p^a < 8, lambda(2^a) = 2^(a-2) for a >= 3.
Factorization carmichael_lambda(const Factorization& f);

// v_p(k!) = sum_{r>=1} floor(k/p^r), without forming k!.
std::uint64_t legendre_factorial_valuation(std::uint64_t k, std::uint64_t p);

// s2(m): ones in the binary expansion.
std::uint32_t binary_digit_sum(std::uint64_t m);

// Valuation vector of m over the basis (repeated division; not a hot path).
ValuationVec valuations_of(std::uint64_t m, const PrimeBasis& basis);

// Valuation vector of the primorial p#: 1 for basis primes <= p, else 0.
ValuationVec primorial_valuations(std::uint32_t p, const PrimeBasis& basis);

// Largest basis prime p with p# dividing the vector's integer, i.e. all
// exponents up to p nonzero. nullopt when the exponent of 2 is zero.
// Throws BasisOverflowError when every basis prime divides (answer not
// determined by the basis).
std::optional<std::uint32_t> largest_primorial_prime(const ValuationVec& v,
                                                     const PrimeBasis& basis);

// Largest k with v_p(k!) <= v[p] for all basis primes p <= k. Always >= 1.
// Throws BasisOverflowError if the search runs past the basis limit.
std::uint32_t largest_k_factorial_dividing(const ValuationVec& v, const PrimeBasis& basis);

// Largest k with v2(k!) <= v. Always odd, since v2(k!) = v2((k+1)!) for even k.
std::uint32_t k0_from_v2(std::uint64_t v);

// Smallest basis prime > p. Throws BasisOverflowError past the basis end.
std::uint32_t next_prime(std::uint32_t p, const PrimeBasis& basis);

}  // namespace phiscan
