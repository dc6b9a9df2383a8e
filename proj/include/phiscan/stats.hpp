#pragma once

#include <cstdint>
#include <vector>

#include "phiscan/arith.hpp"

namespace phiscan {

// Threshold functions of the scan bound x, all in natural logarithms:
//   A0 = log2x/log3x
//   A  = A0 + 3*log2x*log4x/(log3x)^2
//   B  = log2x/(log3x)^2
//   Ar(r) = A0 + (4-r)*log2x*log4x/(log3x)^2
//   y(L) = A + L*B,  yr(L,r) = Ar(r) + L*B
// Iterated logs are held in long double so that the very flat log4x does
// not wobble threshold crossings near integer primes. Ar(1) == A and
// y(0) == A hold bitwise because they share one expression.
class Thresholds {
 public:
  static Thresholds from_x(std::uint64_t x);
  // For bounds given directly by their natural log (x itself may not fit).
  static Thresholds from_log(long double log_x);

  double A0() const { return static_cast<double>(a0_); }
  double A() const { return Ar(1); }
  double B() const { return static_cast<double>(b_); }
  double Ar(int r) const { return static_cast<double>(a0_ + (4 - r) * coef_); }
  double y(double capital_lambda) const { return yr(capital_lambda, 1); }
  double yr(double capital_lambda, int r) const {
    return static_cast<double>(a0_ + (4 - r) * coef_ + static_cast<long double>(capital_lambda) * b_);
  }

  long double log2x() const { return log2x_; }
  long double log3x() const { return log3x_; }
  long double log4x() const { return log4x_; }

 private:
  long double log2x_ = 0, log3x_ = 0, log4x_ = 0;
  long double a0_ = 0, b_ = 0, coef_ = 0;
};

// Integer histogram with a fixed bin range and an explicit overflow bin.
struct Histogram {
  std::vector<std::uint64_t> bins;
  std::uint64_t overflow = 0;

  Histogram() = default;
  explicit Histogram(std::size_t nbins) : bins(nbins, 0) {}
  void add(std::uint64_t k) {
    if (k < bins.size()) ++bins[k];
    else ++overflow;
  }
  std::uint64_t total() const;
  void merge(const Histogram& o);
  bool operator==(const Histogram&) const = default;
};

// Probability mass function over k = 0..probs.size()-1 plus tail mass.
struct Pmf {
  std::vector<double> probs;
  double tail = 0.0;
};

struct PoissonPmf {
  double lambda = 0.0;
  Pmf pmf;
};

// Po(lambda) for k = 0..kmax via the stable recurrence p(k+1) = p(k)*lambda/(k+1);
// the truncated remainder goes to the tail bin.
PoissonPmf poisson_pmf(double lambda, int kmax = 64);

// Normalized pmf of a histogram on the support 0..kmax + tail.
Pmf pmf_from_hist(const Histogram& h, int kmax = 64);

// Number of basis primes p <= y whose exponent in phi_vec is zero.
// y past the basis limit is a basis overflow.
std::uint32_t f_count(const ValuationVec& phi_vec, const PrimeBasis& basis, double y);

// Count over basis primes in (A0, y] with zero exponent in tilde_vec.
// Empty interval (y <= A0) gives 0.
std::uint32_t g_count(const ValuationVec& tilde_vec, const PrimeBasis& basis, double A0,
                      double y);

// Count of basis primes p <= yr whose exponent is < r.
std::uint32_t fr_count(const ValuationVec& phi_vec, const PrimeBasis& basis, double yr,
                       std::uint32_t r);

// (1/N) * sum_k count(k) * k(k-1)...(k-r+1). Rejects r = 0 and histograms
// with overflow mass (falling factorials there are unknown).
double factorial_moment(const Histogram& h, std::uint32_t r);

// Exact falling-factorial sum over the histogram, as an integer.
std::uint64_t falling_factorial_sum(const Histogram& h, std::uint32_t r);

struct SSum {
  double exact = 0.0;     // sum of 1/l over primes l <= x, l = 1 (mod m)
  double estimate = 0.0;  // log2x / phi(m)
};

// Compensated streaming sum over sieved primes in increasing order; the
// block size only batches the sieve and never changes the summation order.
SSum s_sum(std::uint64_t x, std::uint64_t m, std::uint64_t sieve_block = 1u << 20);

// Sum of exp(-log2x/p) over primes p in (A0(x), A(x) + log(lambda)*B(x)].
double exp_sum(std::uint64_t x, double lambda);
double exp_sum(const Thresholds& t, double lambda);

// Half L1 distance between two pmfs on the same support (incl. tail bins).
// Rejects inputs more than 1e-9 away from normalized.
double total_variation(const Pmf& p, const Pmf& q);

}  // namespace phiscan
