#include "phiscan/scan.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "phiscan/errors.hpp"
#include "phiscan/report.hpp"
#include "phiscan/serialize.hpp"
#include "phiscan/util.hpp"

namespace phiscan {

namespace {

using nlohmann::json;

std::string csv_header(const ScanConfig& cfg) {
  std::string h = "n,pr,k_phi,k_lambda,v2_lambda";
  for (double l : cfg.lambdas) {
    h += ",f@" + dtos(l);
    h += ",g@" + dtos(l);
  }
  h += "\n";
  return h;
}

std::string csv_chunk(const std::vector<ScanRecord>& records, const ScanContext& ctx) {
  std::string out;
  out.reserve(records.size() * 32);
  for (const auto& rec : records) {
    out += std::to_string(rec.n);
    out += ',';
    if (rec.pr != 0) out += std::to_string(rec.pr);
    out += ',';
    out += std::to_string(rec.k_phi);
    out += ',';
    out += std::to_string(rec.k_lambda);
    out += ',';
    out += std::to_string(rec.v2_lambda);
    for (std::size_t i = 0; i < ctx.cfg.lambdas.size(); ++i) {
      std::uint32_t f = 0;
      for (std::size_t j = 0; j < ctx.f_cut[i]; ++j) f += rec.phi_vec.e[j] == 0;
      std::uint32_t g = 0;
      for (std::size_t j = ctx.g_lo; j < ctx.g_cut[i]; ++j) g += rec.tilde_vec.e[j] == 0;
      out += ',';
      out += std::to_string(f);
      out += ',';
      out += std::to_string(g);
    }
    out += '\n';
  }
  return out;
}

std::string bitmap_hex(std::uint64_t done_prefix, std::uint64_t total) {
  // Completed segments form a prefix; encode as hex, lowest index = bit 0.
  std::string hex;
  std::uint64_t nbytes = (total + 7) / 8;
  for (std::uint64_t b = 0; b < nbytes; ++b) {
    unsigned byte = 0;
    for (unsigned bit = 0; bit < 8; ++bit) {
      std::uint64_t idx = b * 8 + bit;
      if (idx < done_prefix) byte |= 1u << bit;
    }
    static const char* digits = "0123456789abcdef";
    hex += digits[byte >> 4];
    hex += digits[byte & 0xf];
  }
  return hex;
}

std::uint64_t prefix_from_bitmap(const std::string& hex, std::uint64_t total) {
  auto nib = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    throw ValidationError("checkpoint bitmap is not hex");
  };
  std::uint64_t prefix = 0;
  bool ended = false;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t b = idx / 8;
    if (2 * b + 1 >= hex.size()) throw ValidationError("checkpoint bitmap too short");
    unsigned byte = (nib(hex[2 * b]) << 4) | nib(hex[2 * b + 1]);
    bool done = (byte >> (idx % 8)) & 1;
    if (done) {
      if (ended) throw ValidationError("checkpoint bitmap is not a contiguous prefix");
      ++prefix;
    } else {
      ended = true;
    }
  }
  return prefix;
}

void write_checkpoint(const std::string& path, const ScanConfig& cfg, std::uint64_t total,
                      std::uint64_t done, std::uint64_t csv_bytes,
                      const SegmentAccumulator& acc) {
  json j;
  j["version"] = kCheckpointVersion;
  j["fingerprint"] = cfg.checkpoint_fingerprint();
  j["x"] = cfg.x;
  j["segment_size"] = cfg.segment_size;
  j["segments_total"] = total;
  j["segments_done_bitmap"] = bitmap_hex(done, total);
  j["csv_bytes"] = csv_bytes;
  j["accumulator"] = to_json(acc);
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write checkpoint file: " + tmp);
    out << j.dump();
  }
  std::filesystem::rename(tmp, path);
}

struct ResumeState {
  std::uint64_t start_segment = 0;
  std::uint64_t csv_bytes = 0;
  std::optional<SegmentAccumulator> acc;
};

ResumeState load_checkpoint(const ScanConfig& cfg, std::uint64_t total) {
  ResumeState rs;
  if (cfg.checkpoint_path.empty() || !std::filesystem::exists(cfg.checkpoint_path)) return rs;
  json j;
  {
    std::ifstream in(cfg.checkpoint_path, std::ios::binary);
    if (!in) throw ValidationError("cannot read checkpoint: " + cfg.checkpoint_path);
    in >> j;
  }
  if (j.at("version").get<int>() != kCheckpointVersion)
    throw ValidationError("checkpoint version mismatch; delete " + cfg.checkpoint_path +
                          " to start fresh");
  if (j.at("fingerprint").get<std::uint64_t>() != cfg.checkpoint_fingerprint())
    throw ValidationError(
        "checkpoint was written by a different scan configuration (x, basis, lambdas, r or "
        "segment size differ); delete " + cfg.checkpoint_path + " to start fresh");
  if (j.at("segments_total").get<std::uint64_t>() != total)
    throw ValidationError("checkpoint segment plan mismatch");
  rs.start_segment = prefix_from_bitmap(j.at("segments_done_bitmap").get<std::string>(), total);
  rs.csv_bytes = j.at("csv_bytes").get<std::uint64_t>();
  rs.acc = accumulator_from_json(j.at("accumulator"));
  return rs;
}

struct SegmentResult {
  SegmentAccumulator acc;
  std::string csv;
};

}  // namespace

ScanOutcome run_scan(const ScanConfig& cfg, std::ostream* progress, std::uint64_t max_segments) {
  cfg.validate();
  ScanContext ctx(cfg);
  auto plan = plan_segments(cfg.x, cfg.segment_size);
  const std::uint64_t total = plan.size();

  ResumeState rs = load_checkpoint(cfg, total);
  SegmentAccumulator folded = rs.acc ? *rs.acc : SegmentAccumulator(ctx);
  if (rs.acc && rs.acc->fingerprint != cfg.fingerprint())
    throw ValidationError("checkpoint accumulator fingerprint mismatch");

  std::uint64_t frontier = rs.start_segment;  // next segment index to fold
  const std::uint64_t stop_at =
      max_segments == 0 ? total : std::min<std::uint64_t>(total, max_segments);

  // Per-n CSV: fresh runs write a header; resumed runs truncate back to the
  // checkpointed byte count so re-folded segments are not emitted twice.
  std::fstream csv;
  std::uint64_t csv_bytes = 0;
  if (cfg.emit_per_n) {
    if (frontier == 0 || !std::filesystem::exists(cfg.per_n_path)) {
      csv.open(cfg.per_n_path, std::ios::binary | std::ios::out | std::ios::trunc);
      if (!csv) throw ValidationError("cannot write per-n CSV: " + cfg.per_n_path);
      std::string h = csv_header(cfg);
      csv << h;
      csv_bytes = h.size();
      if (frontier != 0 && rs.csv_bytes != csv_bytes)
        throw ValidationError("checkpoint expects an existing per-n CSV");
    } else {
      std::filesystem::resize_file(cfg.per_n_path, rs.csv_bytes);
      csv.open(cfg.per_n_path, std::ios::binary | std::ios::out | std::ios::in | std::ios::ate);
      if (!csv) throw ValidationError("cannot reopen per-n CSV: " + cfg.per_n_path);
      csv_bytes = rs.csv_bytes;
    }
  }

  unsigned nworkers = cfg.workers != 0 ? cfg.workers : std::thread::hardware_concurrency();
  if (nworkers == 0) nworkers = 1;
  std::uint64_t remaining = stop_at > frontier ? stop_at - frontier : 0;
  nworkers = static_cast<unsigned>(std::min<std::uint64_t>(nworkers, std::max<std::uint64_t>(remaining, 1)));

  std::mutex mu;
  std::condition_variable cv_ready, cv_space;
  std::map<std::uint64_t, SegmentResult> ready;
  std::atomic<std::uint64_t> next_idx{frontier};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  const std::uint64_t window = 4ull * nworkers;
  std::uint64_t fold_pos = frontier;  // shared under mu for backpressure

  auto worker = [&]() {
    try {
      for (;;) {
        std::uint64_t idx = next_idx.fetch_add(1);
        if (idx >= stop_at || failed.load()) return;
        {
          std::unique_lock<std::mutex> lk(mu);
          cv_space.wait(lk, [&] { return failed.load() || idx < fold_pos + window; });
          if (failed.load()) return;
        }
        SegmentResult res;
        if (cfg.emit_per_n) {
          std::vector<ScanRecord> records;
          records.reserve(static_cast<std::size_t>(plan[idx].second - plan[idx].first));
          res.acc = scan_segment(plan[idx].first, plan[idx].second, ctx, &records);
          res.csv = csv_chunk(records, ctx);
        } else {
          res.acc = scan_segment(plan[idx].first, plan[idx].second, ctx);
        }
        {
          std::lock_guard<std::mutex> lk(mu);
          ready.emplace(idx, std::move(res));
        }
        cv_ready.notify_all();
      }
    } catch (...) {
      {
        std::lock_guard<std::mutex> lk(mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
      cv_ready.notify_all();
      cv_space.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (unsigned i = 0; i < nworkers; ++i) pool.emplace_back(worker);

  const std::uint64_t progress_step = std::max<std::uint64_t>(1, total / 50);
  while (frontier < stop_at) {
    SegmentResult res;
    {
      std::unique_lock<std::mutex> lk(mu);
      cv_ready.wait(lk, [&] { return failed.load() || ready.count(frontier) > 0; });
      if (failed.load()) break;
      res = std::move(ready.at(frontier));
      ready.erase(frontier);
    }
    folded.merge(res.acc);
    if (cfg.emit_per_n) {
      csv << res.csv;
      csv_bytes += res.csv.size();
      csv.flush();
    }
    ++frontier;
    {
      std::lock_guard<std::mutex> lk(mu);
      fold_pos = frontier;
    }
    cv_space.notify_all();
    if (!cfg.checkpoint_path.empty())
      write_checkpoint(cfg.checkpoint_path, cfg, total, frontier, csv_bytes, folded);
    if (progress && (frontier % progress_step == 0 || frontier == total))
      *progress << "[scan] segment " << frontier << "/" << total << "\n";
  }

  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  ScanOutcome out;
  out.acc = std::move(folded);
  out.segments_done = frontier;
  out.segments_total = total;
  out.completed = frontier == total;
  if (out.completed) out.report = build_report(out.acc, ctx);
  return out;
}

}  // namespace phiscan
