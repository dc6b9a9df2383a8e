#include "phiscan/stats.hpp"

#include <algorithm>
#include <cmath>

#include "phiscan/errors.hpp"
#include "phiscan/util.hpp"

namespace phiscan {

Thresholds Thresholds::from_x(std::uint64_t x) {
  if (x < 16) throw ValidationError("thresholds need x >= 16 (log3 x must be positive)");
  return from_log(logl(static_cast<long double>(x)));
}

Thresholds Thresholds::from_log(long double log_x) {
  if (!(log_x >= logl(16.0L))) throw ValidationError("thresholds need x >= 16");
  Thresholds t;
  t.log2x_ = logl(log_x);
  t.log3x_ = logl(t.log2x_);
  t.log4x_ = logl(t.log3x_);
  t.a0_ = t.log2x_ / t.log3x_;
  t.b_ = t.log2x_ / (t.log3x_ * t.log3x_);
  t.coef_ = t.log2x_ * t.log4x_ / (t.log3x_ * t.log3x_);
  return t;
}

std::uint64_t Histogram::total() const {
  std::uint64_t n = overflow;
  for (auto b : bins) n += b;
  return n;
}

void Histogram::merge(const Histogram& o) {
  if (bins.size() != o.bins.size()) throw InternalError("histogram bin count mismatch");
  for (std::size_t i = 0; i < bins.size(); ++i) bins[i] += o.bins[i];
  overflow += o.overflow;
}

PoissonPmf poisson_pmf(double lambda, int kmax) {
  if (!(lambda > 0)) throw ValidationError("poisson_pmf needs lambda > 0");
  if (kmax < 0) throw ValidationError("poisson_pmf needs kmax >= 0");
  PoissonPmf out;
  out.lambda = lambda;
  out.pmf.probs.resize(static_cast<std::size_t>(kmax) + 1);
  double p = std::exp(-lambda);
  double sum = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    out.pmf.probs[static_cast<std::size_t>(k)] = p;
    sum += p;
    p = p * lambda / (k + 1);
  }
  out.pmf.tail = sum < 1.0 ? 1.0 - sum : 0.0;
  return out;
}

Pmf pmf_from_hist(const Histogram& h, int kmax) {
  Pmf out;
  out.probs.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  std::uint64_t n = h.total();
  if (n == 0) throw ValidationError("empty histogram has no pmf");
  std::uint64_t tail_count = h.overflow;
  for (std::size_t k = 0; k < h.bins.size(); ++k) {
    if (k < out.probs.size()) out.probs[k] = static_cast<double>(h.bins[k]) / static_cast<double>(n);
    else tail_count += h.bins[k];
  }
  out.tail = static_cast<double>(tail_count) / static_cast<double>(n);
  return out;
}

std::uint32_t f_count(const ValuationVec& phi_vec, const PrimeBasis& basis, double y) {
  if (y > static_cast<double>(basis.limit()))
    throw BasisOverflowError("f cutoff exceeds the basis limit");
  std::size_t c = basis.count_leq(y);
  std::uint32_t missing = 0;
  for (std::size_t i = 0; i < c; ++i)
    if (phi_vec.e[i] == 0) ++missing;
  return missing;
}

std::uint32_t g_count(const ValuationVec& tilde_vec, const PrimeBasis& basis, double A0,
                      double y) {
  if (y > static_cast<double>(basis.limit()))
    throw BasisOverflowError("g cutoff exceeds the basis limit");
  std::size_t lo = basis.count_leq(A0);
  std::size_t hi = basis.count_leq(y);
  std::uint32_t missing = 0;
  for (std::size_t i = lo; i < hi; ++i)
    if (tilde_vec.e[i] == 0) ++missing;
  return missing;
}

std::uint32_t fr_count(const ValuationVec& phi_vec, const PrimeBasis& basis, double yr,
                       std::uint32_t r) {
  if (yr > static_cast<double>(basis.limit()))
    throw BasisOverflowError("f_r cutoff exceeds the basis limit");
  if (r == 0) throw ValidationError("f_r needs r >= 1");
  std::size_t c = basis.count_leq(yr);
  std::uint32_t short_of_r = 0;
  for (std::size_t i = 0; i < c; ++i)
    if (phi_vec.e[i] < r) ++short_of_r;
  return short_of_r;
}

std::uint64_t falling_factorial_sum(const Histogram& h, std::uint32_t r) {
  if (r == 0) throw ValidationError("factorial moment needs r >= 1");
  if (h.overflow > 0) throw ValidationError("histogram overflow mass: falling factorial unknown");
  std::uint64_t sum = 0;
  for (std::size_t k = 0; k < h.bins.size(); ++k) {
    if (h.bins[k] == 0) continue;
    std::uint64_t ff = 1;
    for (std::uint32_t j = 0; j < r; ++j) {
      if (k < j + 1) { ff = 0; break; }
      ff *= (k - j);
    }
    sum += h.bins[k] * ff;
  }
  return sum;
}

double factorial_moment(const Histogram& h, std::uint32_t r) {
  std::uint64_t n = h.total();
  if (n == 0) throw ValidationError("factorial moment of an empty histogram");
  return static_cast<double>(static_cast<long double>(falling_factorial_sum(h, r)) /
                             static_cast<long double>(n));
}

SSum s_sum(std::uint64_t x, std::uint64_t m, std::uint64_t sieve_block) {
  if (x < 3) throw ValidationError("s_sum needs x >= 3");
  if (m == 0) throw ValidationError("s_sum needs m >= 1");
  if (sieve_block < 64) sieve_block = 64;

  SSum out;
  long double l2 = logl(logl(static_cast<long double>(x)));
  std::uint64_t phim = m;
  {
    std::uint64_t mm = m;
    for (std::uint64_t p = 2; p * p <= mm; ++p) {
      if (mm % p == 0) {
        while (mm % p == 0) mm /= p;
        phim -= phim / p;
      }
    }
    if (mm > 1) phim -= phim / mm;
  }
  out.estimate = static_cast<double>(l2 / static_cast<long double>(phim));

  // Segmented enumeration in increasing l; order (and thus the compensated
  // sum) is independent of the block size.
  std::vector<std::uint64_t> base = simple_sieve(isqrt_u64(x));
  KahanSum acc;
  std::vector<char> comp(sieve_block);
  for (std::uint64_t lo = 2; lo <= x; lo += sieve_block) {
    std::uint64_t hi = std::min(x, lo + sieve_block - 1);
    std::fill(comp.begin(), comp.begin() + static_cast<std::ptrdiff_t>(hi - lo + 1), 0);
    for (std::uint64_t p : base) {
      if (p * p > hi) break;
      std::uint64_t first = std::max(p * p, ((lo + p - 1) / p) * p);
      for (std::uint64_t j = first; j <= hi; j += p) comp[j - lo] = 1;
    }
    for (std::uint64_t v = lo; v <= hi; ++v) {
      if (!comp[v - lo] && v % m == 1 % m)
        acc.add(1.0 / static_cast<double>(v));
    }
  }
  out.exact = acc.sum;
  return out;
}

double exp_sum(const Thresholds& t, double lambda) {
  if (!(lambda > 0)) throw ValidationError("exp_sum needs lambda > 0");
  double a0 = t.A0();
  double y = t.y(std::log(lambda));
  if (y > 4e9) throw ValidationError("exp_sum cutoff unreasonably large");
  KahanSum acc;
  if (y > 2.0) {
    double l2 = static_cast<double>(t.log2x());
    for (std::uint64_t p : simple_sieve(static_cast<std::uint64_t>(y))) {
      double pd = static_cast<double>(p);
      if (pd > a0 && pd <= y) acc.add(std::exp(-l2 / pd));
    }
  }
  return acc.sum;
}

double exp_sum(std::uint64_t x, double lambda) {
  return exp_sum(Thresholds::from_x(x), lambda);
}

double total_variation(const Pmf& p, const Pmf& q) {
  if (p.probs.size() != q.probs.size())
    throw ValidationError("total variation needs a shared support");
  auto mass = [](const Pmf& f) {
    double s = f.tail;
    for (double v : f.probs) s += v;
    return s;
  };
  if (std::fabs(mass(p) - 1.0) > 1e-9 || std::fabs(mass(q) - 1.0) > 1e-9)
    throw ValidationError("total variation inputs must be normalized");
  double d = std::fabs(p.tail - q.tail);
  for (std::size_t i = 0; i < p.probs.size(); ++i) d += std::fabs(p.probs[i] - q.probs[i]);
  return 0.5 * d;
}

}  // namespace phiscan
