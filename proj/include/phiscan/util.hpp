#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

namespace phiscan {

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

std::uint64_t isqrt_u64(std::uint64_t n);

// Primes <= limit by a plain sieve of Eratosthenes.
std::vector<std::uint64_t> simple_sieve(std::uint64_t limit);

// FNV-1a over bytes; used for config fingerprints.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Shortest round-trip decimal form of a double (std::to_chars).
inline std::string dtos(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Kahan compensated accumulator.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace phiscan
