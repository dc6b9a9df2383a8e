#include "phiscan/report.hpp"

#include <algorithm>
#include <cmath>

#include "phiscan/errors.hpp"
#include "phiscan/util.hpp"

namespace phiscan {

using nlohmann::json;

std::vector<STableRow> s_table(std::uint64_t x, std::uint64_t m_max, std::uint64_t sieve_block) {
  if (x < 3) throw ValidationError("s_table needs x >= 3");
  if (m_max < 1) throw ValidationError("s_table needs m_max >= 1");
  if (sieve_block < 64) sieve_block = 64;

  std::vector<STableRow> rows(m_max);
  long double l2 = logl(logl(static_cast<long double>(x)));
  for (std::uint64_t m = 1; m <= m_max; ++m) {
    std::uint64_t phim = m, mm = m;
    for (std::uint64_t p = 2; p * p <= mm; ++p) {
      if (mm % p == 0) {
        while (mm % p == 0) mm /= p;
        phim -= phim / p;
      }
    }
    if (mm > 1) phim -= phim / mm;
    rows[m - 1].m = m;
    rows[m - 1].phi_m = phim;
    rows[m - 1].estimate = static_cast<double>(l2 / static_cast<long double>(phim));
  }

  std::vector<KahanSum> acc(m_max);
  std::vector<std::uint64_t> base = simple_sieve(isqrt_u64(x));
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
      if (comp[v - lo]) continue;
      double inv = 1.0 / static_cast<double>(v);
      for (std::uint64_t m = 1; m <= m_max; ++m)
        if (v % m == 1 % m) acc[m - 1].add(inv);
    }
  }
  for (std::uint64_t m = 1; m <= m_max; ++m) rows[m - 1].exact = acc[m - 1].sum;
  return rows;
}

namespace {

json pmf_json(const Pmf& p) {
  return json{{"probs", p.probs}, {"tail", p.tail}};
}

double frac(std::uint64_t num, std::uint64_t den) {
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

}  // namespace

json build_report(const SegmentAccumulator& acc, const ScanContext& ctx) {
  if (acc.count == 0) throw ValidationError("cannot report on an empty accumulator");
  if (acc.fingerprint != ctx.cfg.fingerprint())
    throw ValidationError("accumulator does not match this scan configuration");

  const auto& cfg = ctx.cfg;
  const auto& thr = ctx.thr;
  const std::uint64_t n_total = acc.count;
  const std::size_t nr = cfg.r_values.size();

  json rep;
  rep["schema_version"] = kReportSchemaVersion;
  rep["config"] = json{{"x", cfg.x},
                       {"basis_limit", cfg.basis_limit},
                       {"tilde_cutoff", ctx.tilde_cutoff},
                       {"lambdas", cfg.lambdas},
                       {"r_values", cfg.r_values}};
  rep["count"] = n_total;

  json thrj;
  thrj["A0"] = thr.A0();
  thrj["A"] = thr.A();
  thrj["B"] = thr.B();
  thrj["log2x"] = static_cast<double>(thr.log2x());
  thrj["log3x"] = static_cast<double>(thr.log3x());
  thrj["log4x"] = static_cast<double>(thr.log4x());
  json arj = json::array();
  for (auto r : cfg.r_values)
    arj.push_back(json{{"r", r}, {"value", thr.Ar(static_cast<int>(r))}});
  thrj["Ar"] = arj;
  rep["thresholds"] = thrj;

  json per_lambda = json::array();
  for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
    const double lambda = cfg.lambdas[i];
    const double capital = std::log(lambda);
    json lj;
    lj["lambda"] = lambda;
    lj["capital_lambda"] = capital;
    lj["y"] = thr.y(capital);

    Pmf f_pmf = pmf_from_hist(acc.f_hist[i]);
    Pmf g_pmf = pmf_from_hist(acc.g_hist[i]);
    PoissonPmf po = poisson_pmf(lambda);
    lj["f_pmf"] = pmf_json(f_pmf);
    lj["g_pmf"] = pmf_json(g_pmf);
    lj["poisson_pmf"] = pmf_json(po.pmf);
    lj["tv_f_poisson"] = total_variation(f_pmf, po.pmf);
    lj["tv_g_poisson"] = total_variation(g_pmf, po.pmf);
    lj["f_zero_fraction"] = frac(acc.f_hist[i].bins[0], n_total);
    lj["poisson_zero"] = po.pmf.probs[0];
    lj["fg_disagree_fraction"] = frac(acc.fg_disagree[i], n_total);
    lj["exp_sum"] = exp_sum(thr, lambda);

    // The streamed falling-factorial sums must reproduce the histogram
    // moments exactly; both are integer sums over the same data.
    json mh = json::array(), ms = json::array();
    for (std::uint32_t r = 1; r <= 3; ++r) {
      std::uint64_t from_hist = falling_factorial_sum(acc.g_hist[i], r);
      std::uint64_t streamed = acc.g_fall[i][r - 1];
      if (from_hist != streamed)
        throw InternalError("factorial moment mismatch at lambda=" + dtos(lambda) +
                            " r=" + std::to_string(r));
      mh.push_back(factorial_moment(acc.g_hist[i], r));
      ms.push_back(frac(streamed, n_total));
    }
    lj["g_factorial_moments_hist"] = mh;
    lj["g_factorial_moments_stream"] = ms;

    json frj = json::array();
    for (std::size_t j = 0; j < nr; ++j) {
      json fj;
      fj["r"] = cfg.r_values[j];
      fj["yr"] = thr.yr(capital, static_cast<int>(cfg.r_values[j]));
      fj["pmf"] = pmf_json(pmf_from_hist(acc.fr_hist[i * nr + j]));
      fj["zero_fraction"] = frac(acc.fr_hist[i * nr + j].bins[0], n_total);
      frj.push_back(fj);
    }
    lj["fr"] = frj;
    per_lambda.push_back(lj);
  }
  rep["per_lambda"] = per_lambda;

  rep["parity"] = json{{"k_lambda_odd_fraction", frac(acc.k_lambda_odd, n_total)},
                       {"k_phi_even_fraction", frac(acc.k_phi_even, n_total)}};
  rep["kphi_next_prime_match_fraction"] = frac(acc.kphi_pred_match, n_total);

  json dev = json::array();
  for (auto [d, c] : acc.klambda_dev) dev.push_back(json{d, c});
  rep["klambda_deviation"] = json{{"count", acc.dev_count}, {"hist", dev}};

  rep["v2max_hist"] = json{{"bins", acc.v2max_hist.bins}, {"overflow", acc.v2max_hist.overflow}};

  // Window statistic for max 2^v2(p-1), with xi pinned to log3 x: the
  // fraction of n with log2x/xi <= 2^v <= xi*log2x.
  {
    double xi = static_cast<double>(thr.log3x());
    double l2 = static_cast<double>(thr.log2x());
    std::uint64_t inside = 0;
    if (xi > 0) {
      double wlo = l2 / xi, whi = xi * l2;
      for (std::size_t v = 0; v < acc.v2max_hist.bins.size(); ++v) {
        double m = std::ldexp(1.0, static_cast<int>(v));
        if (m >= wlo && m <= whi) inside += acc.v2max_hist.bins[v];
      }
    }
    rep["lemma41"] = json{{"xi", static_cast<double>(thr.log3x())},
                          {"window_fraction", frac(inside, n_total)},
                          {"v2_match_fraction", frac(acc.lemma_v2_match, n_total)},
                          {"k0_match_fraction", frac(acc.lemma_k0_match, n_total)}};
  }

  json st = json::array();
  for (const auto& row : s_table(cfg.x, kReportSTableMMax)) {
    st.push_back(json{{"m", row.m},
                      {"phi_m", row.phi_m},
                      {"exact", row.exact},
                      {"estimate", row.estimate},
                      {"abs_err", std::fabs(row.exact - row.estimate)}});
  }
  rep["s_table"] = st;

  rep["mark_ops"] = acc.mark_ops;
  return rep;
}

}  // namespace phiscan
