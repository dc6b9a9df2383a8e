#include "phiscan/sieve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "phiscan/errors.hpp"
#include "phiscan/util.hpp"

namespace phiscan {

namespace {

// Inverse of odd p modulo 2^64 (Newton iteration).
std::uint64_t inv64(std::uint64_t p) {
  std::uint64_t inv = p;
  for (int i = 0; i < 5; ++i) inv *= 2 - p * inv;
  return inv;
}

}  // namespace

void ScanConfig::validate() const {
  if (x < 16) throw ValidationError("scan needs x >= 16 (iterated logs undefined below)");
  if (segment_size < 1024) throw ValidationError("segment size must be at least 1024");
  if (lambdas.empty()) throw ValidationError("at least one lambda is required");
  for (double l : lambdas)
    if (!(l > 0)) throw ValidationError("lambda values must be positive");
  if (r_values.empty() || std::find(r_values.begin(), r_values.end(), 1u) == r_values.end())
    throw ValidationError("r values must be nonempty and contain 1");
  for (auto r : r_values)
    if (r < 1) throw ValidationError("r values must be >= 1");
  if (emit_per_n && per_n_path.empty())
    throw ValidationError("per-n emission needs an output path");
  PrimeBasis basis(basis_limit);  // validates primality and size
  Thresholds t = Thresholds::from_x(x);
  for (double l : lambdas) {
    double capital = std::log(l);
    for (auto r : r_values) {
      if (t.yr(capital, static_cast<int>(r)) > static_cast<double>(basis.limit()))
        throw ValidationError("threshold cutoff exceeds the basis limit; raise --basis-limit");
    }
  }
}

std::uint64_t ScanConfig::tilde_cutoff() const {
  Thresholds t = Thresholds::from_x(x);
  if (t.log3x() <= 1.0L) return x;  // x^(1/log3 x) >= x; primes dividing n never exceed x
  long double log_t = logl(static_cast<long double>(x)) / t.log3x();
  auto cutoff = static_cast<std::uint64_t>(floorl(expl(log_t)));
  return std::min(cutoff, x);
}

std::uint64_t ScanConfig::fingerprint() const {
  std::ostringstream os;
  os << "phiscan-acc-v1|x=" << x << "|P=" << basis_limit << "|T=" << tilde_cutoff() << "|L=";
  for (double l : lambdas) os << dtos(l) << ",";
  os << "|R=";
  for (auto r : r_values) os << r << ",";
  return fnv1a(os.str());
}

std::uint64_t ScanConfig::checkpoint_fingerprint() const {
  return fnv1a("|seg=" + std::to_string(segment_size), fingerprint());
}

ScanContext::ScanContext(const ScanConfig& config)
    : cfg(config), basis(config.basis_limit), thr(Thresholds::from_x(config.x)) {
  cfg.validate();
  tilde_cutoff = cfg.tilde_cutoff();
  sqrt_x = isqrt_u64(cfg.x);

  base_primes = simple_sieve(sqrt_x);
  base_pm1.reserve(base_primes.size());
  for (std::uint64_t p : base_primes) base_pm1.push_back(pminus1_valuations(p, basis));
  base_v2pm1.resize(base_primes.size());
  base_bidx.assign(base_primes.size(), 255);
  base_inv.resize(base_primes.size());
  base_thr.resize(base_primes.size());
  for (std::size_t i = 0; i < base_primes.size(); ++i) {
    std::uint64_t p = base_primes[i];
    base_v2pm1[i] = static_cast<std::uint8_t>(p == 2 ? 0 : std::countr_zero(p - 1));
    if (p <= basis.limit())
      if (auto bi = basis.index_of(static_cast<std::uint32_t>(p))) base_bidx[i] = static_cast<std::uint8_t>(*bi);
    if (p > 2) {
      base_inv[i] = inv64(p);
      base_thr[i] = UINT64_MAX / p;
    }
  }
  basis_inv.resize(basis.size());
  basis_thr.resize(basis.size());
  for (std::size_t i = 1; i < basis.size(); ++i) {
    basis_inv[i] = inv64(basis.prime(i));
    basis_thr[i] = UINT64_MAX / basis.prime(i);
  }

  g_lo = basis.count_leq(thr.A0());
  for (double l : cfg.lambdas) {
    double capital = std::log(l);
    f_cut.push_back(basis.count_leq(thr.y(capital)));
    g_cut.push_back(std::max(basis.count_leq(thr.y(capital)), g_lo));
    std::vector<std::size_t> per_r;
    for (auto r : cfg.r_values)
      per_r.push_back(basis.count_leq(thr.yr(capital, static_cast<int>(r))));
    fr_cut.push_back(std::move(per_r));
  }

  legendre_vec.resize(basis.limit() + 2);
  for (std::uint32_t k = 0; k <= basis.limit() + 1; ++k) {
    ValuationVec v;
    for (std::size_t i = 0; i < basis.size(); ++i)
      v.e[i] = static_cast<std::uint8_t>(legendre_factorial_valuation(k, basis.prime(i)));
    legendre_vec[k] = v;
  }

  k0_table.resize(256);
  for (std::uint32_t v = 0; v < 256; ++v) k0_table[v] = k0_from_v2(v);

  // round(log3 n / log 2) is a step function with very few jumps below 2^63.
  const long double ln2 = logl(2.0L);
  dev_breaks.emplace_back(16, 0);
  for (std::int32_t d = 1;; ++d) {
    long double e3 = expl(expl(expl((static_cast<long double>(d) - 0.5L) * ln2)));
    if (e3 > static_cast<long double>(cfg.x)) break;
    auto first = static_cast<std::uint64_t>(ceill(e3));
    dev_breaks.emplace_back(std::max<std::uint64_t>(first, 16), d);
  }
}

std::uint32_t ScanContext::largest_k(const ValuationVec& v) const {
  std::uint32_t k = 1;
  while (true) {
    std::uint32_t next = k + 1;
    if (next > basis.limit())
      throw BasisOverflowError("factorial cutoff search ran past the basis limit");
    if (!legendre_vec[next].leq(v)) return k;
    k = next;
  }
}

std::int32_t ScanContext::dev_target(std::uint64_t n) const {
  auto it = std::upper_bound(dev_breaks.begin(), dev_breaks.end(), n,
                             [](std::uint64_t v, const auto& b) { return v < b.first; });
  return (--it)->second;
}

SegmentAccumulator::SegmentAccumulator(const ScanContext& ctx) {
  fingerprint = ctx.cfg.fingerprint();
  std::size_t nl = ctx.cfg.lambdas.size();
  std::size_t nr = ctx.cfg.r_values.size();
  std::size_t nbins = ctx.basis.limit() + 1;
  f_hist.assign(nl, Histogram(nbins));
  g_hist.assign(nl, Histogram(nbins));
  fr_hist.assign(nl * nr, Histogram(nbins));
  fg_disagree.assign(nl, 0);
  g_fall.assign(nl, {0, 0, 0});
  v2max_hist = Histogram(65);
}

void SegmentAccumulator::merge(const SegmentAccumulator& o) {
  if (fingerprint != o.fingerprint)
    throw ValidationError("cannot merge accumulators from different scan configs");
  count += o.count;
  for (std::size_t i = 0; i < f_hist.size(); ++i) f_hist[i].merge(o.f_hist[i]);
  for (std::size_t i = 0; i < g_hist.size(); ++i) g_hist[i].merge(o.g_hist[i]);
  for (std::size_t i = 0; i < fr_hist.size(); ++i) fr_hist[i].merge(o.fr_hist[i]);
  for (std::size_t i = 0; i < fg_disagree.size(); ++i) fg_disagree[i] += o.fg_disagree[i];
  for (std::size_t i = 0; i < g_fall.size(); ++i)
    for (int r = 0; r < 3; ++r) g_fall[i][r] += o.g_fall[i][r];
  k_lambda_odd += o.k_lambda_odd;
  k_phi_even += o.k_phi_even;
  kphi_pred_match += o.kphi_pred_match;
  for (auto [d, c] : o.klambda_dev) klambda_dev[d] += c;
  dev_count += o.dev_count;
  v2max_hist.merge(o.v2max_hist);
  lemma_v2_match += o.lemma_v2_match;
  lemma_k0_match += o.lemma_k0_match;
  mark_ops += o.mark_ops;
}

std::vector<std::uint64_t> base_primes(std::uint64_t limit) {
  if (limit < 2) throw ValidationError("base_primes needs limit >= 2");
  return simple_sieve(limit);
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> plan_segments(std::uint64_t x,
                                                                   std::uint64_t segment_size) {
  if (x < 1 || segment_size < 1) throw ValidationError("bad segment plan parameters");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t lo = 1; lo <= x; lo += segment_size)
    out.emplace_back(lo, std::min(x, lo + segment_size - 1) + 1);
  return out;
}

ValuationVec pminus1_valuations(std::uint64_t ell, const PrimeBasis& basis) {
  if (ell < 2) throw ValidationError("pminus1_valuations needs a prime >= 2");
  if (ell == 2) return ValuationVec{};
  return valuations_of(ell - 1, basis);
}

PMinus1Memo::PMinus1Memo(const std::vector<std::uint64_t>& primes, const PrimeBasis& basis) {
  table_.reserve(primes.size());
  for (std::uint64_t p : primes) table_.push_back(pminus1_valuations(p, basis));
}

namespace {

struct Scratch {
  std::vector<std::uint64_t> residual;
  std::vector<ValuationVec> phi, til, lam;
  std::vector<std::uint8_t> v2max;
  void reset(std::size_t width, std::uint64_t lo) {
    residual.resize(width);
    phi.assign(width, ValuationVec{});
    til.assign(width, ValuationVec{});
    lam.assign(width, ValuationVec{});
    v2max.assign(width, 0);
    for (std::size_t i = 0; i < width; ++i) residual[i] = lo + i;
  }
};

}  // namespace

SegmentAccumulator scan_segment(std::uint64_t lo, std::uint64_t hi, const ScanContext& ctx,
                                std::vector<ScanRecord>* records) {
  if (lo < 1 || hi <= lo || hi > ctx.cfg.x + 1)
    throw ValidationError("segment range outside [1, x]");
  const std::size_t width = static_cast<std::size_t>(hi - lo);
  const std::uint64_t T = ctx.tilde_cutoff;

  thread_local Scratch scratch;
  scratch.reset(width, lo);
  auto* residual = scratch.residual.data();
  auto* phi = scratch.phi.data();
  auto* til = scratch.til.data();
  auto* lam = scratch.lam.data();
  auto* v2max = scratch.v2max.data();

  SegmentAccumulator acc(ctx);
  std::uint64_t ops = 0;

  // Factor every n in the segment by marking multiples of the base primes.
  for (std::size_t pi = 0; pi < ctx.base_primes.size(); ++pi) {
    const std::uint64_t p = ctx.base_primes[pi];
    if (p >= hi) break;
    const ValuationVec& pm1 = ctx.base_pm1[pi];
    const std::uint8_t v2p = ctx.base_v2pm1[pi];
    const std::uint8_t bidx = ctx.base_bidx[pi];
    const bool in_tilde = p <= T;

    std::uint64_t first = std::max(p, ((lo + p - 1) / p) * p);
    if (p == 2) {
      for (std::uint64_t m = first; m < hi; m += 2) {
        std::size_t idx = static_cast<std::size_t>(m - lo);
        std::uint64_t r = residual[idx];
        auto a = static_cast<std::uint32_t>(std::countr_zero(r));
        residual[idx] = r >> a;
        ops += a;
        // phi picks up v2(2^a) = a-1; (2-1) contributes nothing anywhere.
        phi[idx].e[0] = static_cast<std::uint8_t>(phi[idx].e[0] + (a - 1));
        if (a == 2) lam[idx].e[0] = std::max<std::uint8_t>(lam[idx].e[0], 1);
        else if (a >= 3) lam[idx].e[0] = std::max(lam[idx].e[0], static_cast<std::uint8_t>(a - 2));
      }
      continue;
    }

    const std::uint64_t inv = ctx.base_inv[pi];
    const std::uint64_t thr = ctx.base_thr[pi];
    for (std::uint64_t m = first; m < hi; m += p) {
      std::size_t idx = static_cast<std::size_t>(m - lo);
      std::uint64_t q = residual[idx] * inv;  // exact: p | residual here
      std::uint32_t a = 1;
      ++ops;
      for (std::uint64_t q2 = q * inv; q2 <= thr; q2 = q * inv) {
        q = q2;
        ++a;
        ++ops;
      }
      residual[idx] = q;

      phi[idx].add(pm1);
      if (in_tilde) til[idx].add(pm1);
      lam[idx].max_with(pm1);
      if (a > 1 && bidx != 255) {
        phi[idx].e[bidx] = static_cast<std::uint8_t>(phi[idx].e[bidx] + (a - 1));
        lam[idx].e[bidx] = std::max(lam[idx].e[bidx], static_cast<std::uint8_t>(a - 1));
      }
      if (v2p > v2max[idx]) v2max[idx] = v2p;
    }
  }
  acc.mark_ops = ops;

  const std::size_t nl = ctx.cfg.lambdas.size();
  const std::size_t nr = ctx.cfg.r_values.size();
  std::size_t dev_ptr = 0;
  while (dev_ptr + 1 < ctx.dev_breaks.size() && ctx.dev_breaks[dev_ptr + 1].first <= lo)
    ++dev_ptr;

  for (std::size_t idx = 0; idx < width; ++idx) {
    const std::uint64_t n = lo + idx;
    std::uint64_t r = residual[idx];
    if (r > 1) {
      if (r <= ctx.sqrt_x) {
        throw InternalError("composite residual " + std::to_string(r) + " at n=" +
                            std::to_string(n) + "; base primes incomplete");
      }
      // Single leftover prime > sqrt(x), to the first power.
      std::uint64_t m = r - 1;
      ValuationVec pm1;
      auto v2 = static_cast<std::uint8_t>(std::countr_zero(m));
      pm1.e[0] = v2;
      m >>= v2;
      for (std::size_t i = 1; i < ctx.basis.size() && m > 1; ++i) {
        const std::uint64_t inv = ctx.basis_inv[i];
        const std::uint64_t thr = ctx.basis_thr[i];
        std::uint8_t v = 0;
        for (std::uint64_t q = m * inv; q <= thr; q = m * inv) {
          m = q;
          ++v;
        }
        pm1.e[i] = v;
      }
      phi[idx].add(pm1);
      if (r <= T) til[idx].add(pm1);
      lam[idx].max_with(pm1);
      if (v2 > v2max[idx]) v2max[idx] = v2;
    }

    const ValuationVec& pv = phi[idx];
    const ValuationVec& tv = til[idx];
    const ValuationVec& lv = lam[idx];
    const std::uint8_t v2l = lv.e[0];

    std::size_t miss = 0;
    while (miss < ctx.basis.size() && pv.e[miss] >= 1) ++miss;
    if (miss == ctx.basis.size())
      throw InternalError("phi valuations saturate the basis at n=" + std::to_string(n));
    const std::uint32_t pr = miss == 0 ? 0 : ctx.basis.prime(miss - 1);

    const std::uint32_t k_phi = ctx.largest_k(pv);
    const std::uint32_t k_lambda = ctx.largest_k(lv);

    for (std::size_t i = 0; i < nl; ++i) {
      std::uint32_t f = 0;
      for (std::size_t j = 0; j < ctx.f_cut[i]; ++j) f += pv.e[j] == 0;
      std::uint32_t g = 0;
      for (std::size_t j = ctx.g_lo; j < ctx.g_cut[i]; ++j) g += tv.e[j] == 0;
      acc.f_hist[i].add(f);
      acc.g_hist[i].add(g);
      acc.fg_disagree[i] += f != g;
      std::uint64_t g64 = g;
      acc.g_fall[i][0] += g64;
      acc.g_fall[i][1] += g64 * (g64 >= 1 ? g64 - 1 : 0);
      acc.g_fall[i][2] += g64 * (g64 >= 2 ? (g64 - 1) * (g64 - 2) : 0);
      for (std::size_t j = 0; j < nr; ++j) {
        const std::uint32_t r_need = ctx.cfg.r_values[j];
        std::uint32_t fr = 0;
        for (std::size_t b = 0; b < ctx.fr_cut[i][j]; ++b) fr += pv.e[b] < r_need;
        acc.fr_hist[i * nr + j].add(fr);
      }
    }

    acc.k_lambda_odd += k_lambda & 1;
    acc.k_phi_even += (k_phi & 1) == 0;
    if (pr != 0) {
      // next basis prime after pr sits exactly at index `miss`
      acc.kphi_pred_match += k_phi == ctx.basis.prime(miss) - 1;
    }
    if (n >= 16) {
      while (dev_ptr + 1 < ctx.dev_breaks.size() && ctx.dev_breaks[dev_ptr + 1].first <= n)
        ++dev_ptr;
      acc.klambda_dev[static_cast<std::int32_t>(k_lambda) - ctx.dev_breaks[dev_ptr].second] += 1;
      ++acc.dev_count;
    }
    acc.v2max_hist.add(v2max[idx]);
    acc.lemma_v2_match += v2l == v2max[idx];
    acc.lemma_k0_match += k_lambda == ctx.k0_table[v2l];
    ++acc.count;

    if (records) {
      ScanRecord rec;
      rec.n = n;
      rec.phi_vec = pv;
      rec.tilde_vec = tv;
      rec.lambda_vec = lv;
      rec.v2_lambda = v2l;
      rec.pr = pr;
      rec.k_phi = k_phi;
      rec.k_lambda = k_lambda;
      records->push_back(rec);
    }
  }
  return acc;
}

}  // namespace phiscan
