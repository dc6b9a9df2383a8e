#include "phiscan/arith.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "phiscan/util.hpp"

namespace phiscan {

std::uint64_t Factorization::value() const {
  std::uint64_t v = 1;
  for (auto [p, a] : factors) {
    for (std::uint32_t i = 0; i < a; ++i) {
      if (v > UINT64_MAX / p) throw InternalError("factorization value exceeds 64 bits");
      v *= p;
    }
  }
  return v;
}

PrimeBasis::PrimeBasis(std::uint32_t limit) : limit_(limit) {
  if (limit < 2) throw ValidationError("basis limit must be at least 2");
  if (!is_prime_u64(limit)) throw ValidationError("basis limit must be prime");
  for (std::uint64_t p : simple_sieve(limit)) primes_.push_back(static_cast<std::uint32_t>(p));
  if (primes_.size() > kMaxPrimes)
    throw ValidationError("basis limit too large (at most 32 primes supported)");
}

std::optional<std::size_t> PrimeBasis::index_of(std::uint32_t p) const {
  auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
  if (it != primes_.end() && *it == p) return static_cast<std::size_t>(it - primes_.begin());
  return std::nullopt;
}

std::size_t PrimeBasis::count_leq(double y) const {
  std::size_t c = 0;
  while (c < primes_.size() && static_cast<double>(primes_[c]) <= y) ++c;
  return c;
}

std::uint32_t valuation(std::uint64_t m, std::uint64_t p) {
  if (m == 0) throw ValidationError("valuation of 0 is infinite");
  if (!is_prime_u64(p)) throw ValidationError("valuation requires a prime modulus");
  std::uint32_t v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

Factorization factorize(std::uint64_t m) {
  if (m == 0) throw ValidationError("cannot factorize 0");
  Factorization f;
  if (m == 1) return f;
  std::uint64_t root = isqrt_u64(m);
  for (std::uint64_t p : simple_sieve(root)) {
    if (p * p > m) break;
    if (m % p == 0) {
      std::uint32_t a = 0;
      while (m % p == 0) {
        m /= p;
        ++a;
      }
      f.factors.emplace_back(p, a);
    }
  }
  if (m > 1) f.factors.emplace_back(m, 1);  // residual prime > sqrt(original m)
  return f;
}

namespace {

void merge_add(std::map<std::uint64_t, std::uint32_t>& acc, const Factorization& f,
               std::uint32_t mult = 1) {
  for (auto [p, a] : f.factors) acc[p] += a * mult;
}

Factorization from_map(const std::map<std::uint64_t, std::uint32_t>& acc) {
  Factorization out;
  for (auto [p, a] : acc)
    if (a > 0) out.factors.emplace_back(p, a);
  return out;
}

}  // namespace

Factorization euler_phi(const Factorization& f) {
  std::map<std::uint64_t, std::uint32_t> acc;
  for (auto [p, a] : f.factors) {
    if (a > 1) acc[p] += a - 1;
    merge_add(acc, factorize(p - 1));
  }
  return from_map(acc);
}

Factorization carmichael_lambda(const Factorization& f) {
  std::map<std::uint64_t, std::uint32_t> acc;  // lcm = componentwise max
  auto take_max = [&acc](const std::map<std::uint64_t, std::uint32_t>& comp) {
    for (auto [p, a] : comp) {
      auto& cur = acc[p];
      cur = std::max(cur, a);
    }
  };
  for (auto [p, a] : f.factors) {
    std::map<std::uint64_t, std::uint32_t> comp;
    if (p == 2) {
      if (a == 2) comp[2] = 1;
      else if (a >= 3) comp[2] = a - 2;
      // lambda(2) = 1: empty component
    } else {
      if (a > 1) comp[p] = a - 1;
      for (auto [q, b] : factorize(p - 1).factors) comp[q] += b;
    }
    take_max(comp);
  }
  return from_map(acc);
}

std::uint64_t legendre_factorial_valuation(std::uint64_t k, std::uint64_t p) {
  if (!is_prime_u64(p)) throw ValidationError("legendre valuation requires a prime");
  std::uint64_t total = 0;
  for (std::uint64_t q = p; q <= k; ) {
    total += k / q;
    if (q > k / p) break;  // q*p would overflow past k
    q *= p;
  }
  return total;
}

std::uint32_t binary_digit_sum(std::uint64_t m) {
  return static_cast<std::uint32_t>(std::popcount(m));
}

ValuationVec valuations_of(std::uint64_t m, const PrimeBasis& basis) {
  if (m == 0) throw ValidationError("valuation vector of 0 is undefined");
  ValuationVec v;
  for (std::size_t i = 0; i < basis.size() && m > 1; ++i) {
    std::uint64_t p = basis.prime(i);
    while (m % p == 0) {
      m /= p;
      ++v.e[i];
    }
  }
  return v;
}

ValuationVec primorial_valuations(std::uint32_t p, const PrimeBasis& basis) {
  if (!is_prime_u64(p)) throw ValidationError("primorial of a non-prime");
  if (p > basis.limit()) throw BasisOverflowError("primorial prime exceeds basis limit");
  ValuationVec v;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.prime(i) <= p) v.e[i] = 1;
  return v;
}

std::optional<std::uint32_t> largest_primorial_prime(const ValuationVec& v,
                                                     const PrimeBasis& basis) {
  std::size_t i = 0;
  while (i < basis.size() && v.e[i] >= 1) ++i;
  if (i == basis.size())
    throw BasisOverflowError("all basis primes divide; largest primorial prime undetermined");
  if (i == 0) return std::nullopt;
  return basis.prime(i - 1);
}

std::uint32_t largest_k_factorial_dividing(const ValuationVec& v, const PrimeBasis& basis) {
  std::uint32_t k = 1;  // 1! divides everything
  for (;;) {
    std::uint32_t next = k + 1;
    if (next > basis.limit())
      throw BasisOverflowError("factorial cutoff search ran past the basis limit");
    bool ok = true;
    for (std::size_t i = 0; i < basis.size() && basis.prime(i) <= next; ++i) {
      if (legendre_factorial_valuation(next, basis.prime(i)) > v.e[i]) {
        ok = false;
        break;
      }
    }
    if (!ok) return k;
    k = next;
  }
}

std::uint32_t k0_from_v2(std::uint64_t v) {
  if (v > 0xFFFFFF00ULL) throw ValidationError("k0_from_v2: v out of range");
  // v2(k!) = k - s2(k), so k = v+1 always qualifies and the maximum
  // is at most v + 64 away.
  std::uint64_t k = v + 1;
  while ((k + 1) - binary_digit_sum(k + 1) <= v) ++k;
  return static_cast<std::uint32_t>(k);
}

std::uint32_t next_prime(std::uint32_t p, const PrimeBasis& basis) {
  auto idx = basis.index_of(p);
  if (!idx) throw ValidationError("next_prime argument must be a basis prime");
  if (*idx + 1 >= basis.size())
    throw BasisOverflowError("next prime exceeds basis limit");
  return basis.prime(*idx + 1);
}

}  // namespace phiscan
