#include "phiscan/serialize.hpp"

namespace phiscan {

using nlohmann::json;

json to_json(const Histogram& h) {
  return json{{"bins", h.bins}, {"overflow", h.overflow}};
}

Histogram histogram_from_json(const json& j) {
  Histogram h;
  h.bins = j.at("bins").get<std::vector<std::uint64_t>>();
  h.overflow = j.at("overflow").get<std::uint64_t>();
  return h;
}

json to_json(const SegmentAccumulator& acc) {
  json j;
  j["fingerprint"] = acc.fingerprint;
  j["count"] = acc.count;
  auto hists = [](const std::vector<Histogram>& v) {
    json a = json::array();
    for (const auto& h : v) a.push_back(to_json(h));
    return a;
  };
  j["f_hist"] = hists(acc.f_hist);
  j["g_hist"] = hists(acc.g_hist);
  j["fr_hist"] = hists(acc.fr_hist);
  j["fg_disagree"] = acc.fg_disagree;
  json falls = json::array();
  for (const auto& f : acc.g_fall) falls.push_back(json{f[0], f[1], f[2]});
  j["g_fall"] = falls;
  j["k_lambda_odd"] = acc.k_lambda_odd;
  j["k_phi_even"] = acc.k_phi_even;
  j["kphi_pred_match"] = acc.kphi_pred_match;
  json dev = json::array();
  for (auto [d, c] : acc.klambda_dev) dev.push_back(json{d, c});
  j["klambda_dev"] = dev;
  j["dev_count"] = acc.dev_count;
  j["v2max_hist"] = to_json(acc.v2max_hist);
  j["lemma_v2_match"] = acc.lemma_v2_match;
  j["lemma_k0_match"] = acc.lemma_k0_match;
  j["mark_ops"] = acc.mark_ops;
  return j;
}

SegmentAccumulator accumulator_from_json(const json& j) {
  SegmentAccumulator acc;
  acc.fingerprint = j.at("fingerprint").get<std::uint64_t>();
  acc.count = j.at("count").get<std::uint64_t>();
  for (const auto& h : j.at("f_hist")) acc.f_hist.push_back(histogram_from_json(h));
  for (const auto& h : j.at("g_hist")) acc.g_hist.push_back(histogram_from_json(h));
  for (const auto& h : j.at("fr_hist")) acc.fr_hist.push_back(histogram_from_json(h));
  acc.fg_disagree = j.at("fg_disagree").get<std::vector<std::uint64_t>>();
  for (const auto& f : j.at("g_fall"))
    acc.g_fall.push_back({f.at(0).get<std::uint64_t>(), f.at(1).get<std::uint64_t>(),
                          f.at(2).get<std::uint64_t>()});
  acc.k_lambda_odd = j.at("k_lambda_odd").get<std::uint64_t>();
  acc.k_phi_even = j.at("k_phi_even").get<std::uint64_t>();
  acc.kphi_pred_match = j.at("kphi_pred_match").get<std::uint64_t>();
  for (const auto& e : j.at("klambda_dev"))
    acc.klambda_dev[e.at(0).get<std::int32_t>()] = e.at(1).get<std::uint64_t>();
  acc.dev_count = j.at("dev_count").get<std::uint64_t>();
  acc.v2max_hist = histogram_from_json(j.at("v2max_hist"));
  acc.lemma_v2_match = j.at("lemma_v2_match").get<std::uint64_t>();
  acc.lemma_k0_match = j.at("lemma_k0_match").get<std::uint64_t>();
  acc.mark_ops = j.at("mark_ops").get<std::uint64_t>();
  return acc;
}

}  // namespace phiscan
