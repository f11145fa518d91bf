#pragma once
// Campaign reports: a key=value summary, the raw counters, and plot-ready
// breakdown tables. Files are written whole to a temp name and renamed, so
// a crash never leaves a truncated report. Output bytes are a pure
// function of configuration and seed: no timestamps, no host data, no
// worker-count dependence.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssvf/campaign.hpp"
#include "ssvf/config.hpp"
#include "ssvf/metrics.hpp"
#include "ssvf/system.hpp"

namespace ssvf {

inline void atomic_write(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << body;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string("na");
}

using KvList = std::vector<std::pair<std::string, std::string>>;

// Counter names and values, flattened in a fixed order shared by the
// counters file and the recomputation path.
inline KvList flatten_counters(const CampaignCounters& c) {
  KvList kv;
  auto add = [&kv](const std::string& k, std::uint64_t v) {
    kv.emplace_back(k, std::to_string(v));
  };
  add("runs", c.runs);
  add("injections", c.injections);
  static const char* bucket_keys[3] = {"user", "nonuser", "invalid"};
  for (int f = 0; f < 2; ++f)
    for (int b = 0; b < 3; ++b)
      add(std::string("injected_") + field_name(FieldKind(f)) + "_" +
              bucket_keys[b],
          c.injected[f][b]);
  for (unsigned m = 1; m <= CampaignCounters::kMaxM; ++m)
    add("injected_m_" + std::to_string(m), c.injected_by_m[m]);
  for (int s = 0; s < 3; ++s)
    add(std::string("injected_shape_") + shape_name(UpsetShape(s)),
        c.injected_by_shape[s]);
  for (int l = 0; l < 2; ++l)
    add(std::string("injected_level_") + level_name(Level(l)),
        c.injected_by_level[l]);
  for (int o = 0; o < int(OutcomeClass::Count_); ++o)
    add(std::string("outcome_") + outcome_name(OutcomeClass(o)),
        c.outcomes[o]);
  for (int m = 0; m < int(MaskKind::Count_); ++m)
    add(mask_name(MaskKind(m)), c.masks[m]);
  for (int f = 0; f < 2; ++f)
    add(std::string("du_faults_") + field_name(FieldKind(f)),
        c.du_by_field[f]);
  for (int f = 0; f < 2; ++f)
    add(std::string("dl_faults_") + field_name(FieldKind(f)),
        c.dl_by_field[f]);
  for (int s = 0; s < int(FailureSource::Count_); ++s)
    add(std::string("du_source_") + source_name(FailureSource(s)),
        c.du_by_source[s]);
  for (int s = 0; s < int(FailureSource::Count_); ++s)
    add(std::string("dl_source_") + source_name(FailureSource(s)),
        c.dl_by_source[s]);
  for (unsigned m = 1; m <= CampaignCounters::kMaxM; ++m)
    add("du_m_" + std::to_string(m), c.du_by_m[m]);
  for (unsigned m = 1; m <= CampaignCounters::kMaxM; ++m)
    add("dl_m_" + std::to_string(m), c.dl_by_m[m]);
  for (int k = 0; k < int(DlKind::Count_); ++k)
    add(std::string(dl_name(DlKind(k))) + "_events", c.dl_kind_count[k]);
  for (int k = 0; k < int(DlKind::Count_); ++k)
    add(std::string(dl_name(DlKind(k))) + "_bytes", c.dl_kind_bytes[k]);
  add("dl_bytes_total", c.dl_bytes_total);
  add("dl_events_from_due", c.dl_events_from_due);
  add("reboots", c.reboots);
  add("benign_sdc", c.benign_sdc);
  add("untouched", c.untouched);
  return kv;
}

// Keys that define what was simulated; `compare` refuses reports that do
// not agree on all of them.
inline const std::vector<std::string>& identity_keys() {
  static const std::vector<std::string> keys = {
      "l1_sets",          "l1_ways",
      "l2_sets",          "l2_ways",
      "line_bytes",       "word_bytes",
      "tag_bits",         "phys_bytes",
      "user_bytes",       "os_bytes",
      "workload",         "requests",
      "request_kb",       "pattern",
      "read_fraction",    "inter_arrival_us",
      "os_overhead_ratio","os_write_fraction",
      "workload_seed",    "user_fill",
      "stream_len"};
  return keys;
}

inline KvList summary_kv(const RunConfig& cfg, const CampaignResult& result,
                         const SystemStats& sys, const AnnualRates& annual,
                         const std::string& annual_basis,
                         double annual_rate) {
  const CampaignCounters& c = result.counters;
  const AddressMap map = cfg.address_map();
  KvList kv;
  auto add = [&kv](const std::string& k, const std::string& v) {
    kv.emplace_back(k, v);
  };
  auto addu = [&add](const std::string& k, std::uint64_t v) {
    add(k, std::to_string(v));
  };
  add("format", "1");
  addu("l1_sets", cfg.geom.l1_sets);
  addu("l1_ways", cfg.geom.l1_ways);
  addu("l2_sets", cfg.geom.l2_sets);
  addu("l2_ways", cfg.geom.l2_ways);
  addu("line_bytes", cfg.geom.line_bytes);
  addu("word_bytes", cfg.geom.word_bytes);
  addu("tag_bits", cfg.geom.tag_bits);
  addu("phys_bytes", map.phys_bytes);
  addu("user_bytes", map.user_bytes);
  addu("os_bytes", map.os_bytes);
  add("workload", cfg.source == WorkloadSource::Synthetic ? "synthetic"
                                                          : cfg.trace_path);
  addu("requests", cfg.synth.requests);
  addu("request_kb", cfg.synth.size_kb);
  add("pattern", cfg.synth.pattern == AddressPattern::Sequential
                     ? "sequential"
                     : "random");
  add("read_fraction", fmt_double(cfg.synth.read_fraction));
  add("inter_arrival_us", fmt_double(cfg.synth.inter_arrival_us));
  add("os_overhead_ratio", fmt_double(cfg.expand.os_overhead_ratio));
  add("os_write_fraction", fmt_double(cfg.expand.os_write_fraction));
  addu("workload_seed", cfg.effective_workload_seed());
  add("user_fill", cfg.user_fill_l2_only ? "l2_only" : "l1");
  addu("stream_len", result.stream_len);

  add("scheme", scheme_name(cfg.scheme_kind));
  addu("interleave_ways", cfg.scheme().interleave_ways);
  add("mbu", cfg.mbu_name);
  add("control_logic", cfg.control_logic ? "1" : "0");
  add("redundancy", redundancy_name(cfg.redundancy.mode));
  add("reboot_seconds", fmt_double(cfg.redundancy.reboot_seconds));
  add("seu_per_year", fmt_double(cfg.redundancy.seu_per_year));
  add("p_not_manifest", fmt_double(cfg.manifestation.p_not_manifest));
  add("p_os_dl", fmt_double(cfg.manifestation.p_os_dl));
  addu("seed", cfg.seed);
  addu("n", c.runs);

  addu("injections", c.injections);
  addu("reboots", c.reboots);
  addu("benign_sdc", c.benign_sdc);
  addu("untouched", c.untouched);
  addu("dl_bytes_controller", c.dl_bytes_total);
  addu("dl_events_from_due", c.dl_events_from_due);

  add("avf_sdc_tag_user", fmt_opt(avf_sdc(c, FieldKind::Tag, true)));
  add("avf_sdc_data_user", fmt_opt(avf_sdc(c, FieldKind::Data, true)));
  add("avf_sdc_tag_nonuser", fmt_opt(avf_sdc(c, FieldKind::Tag, false)));
  add("avf_sdc_data_nonuser", fmt_opt(avf_sdc(c, FieldKind::Data, false)));
  add("avf_due_tag", fmt_opt(avf_due(c, FieldKind::Tag)));
  add("avf_due_data", fmt_opt(avf_due(c, FieldKind::Data)));
  add("ssvf_du_tag", fmt_opt(ssvf(c, FailureKind::Du, FieldKind::Tag)));
  add("ssvf_du_data", fmt_opt(ssvf(c, FailureKind::Du, FieldKind::Data)));
  add("ssvf_dl_tag", fmt_opt(ssvf(c, FailureKind::Dl, FieldKind::Tag)));
  add("ssvf_dl_data", fmt_opt(ssvf(c, FailureKind::Dl, FieldKind::Data)));

  addu("sys_runs", sys.runs);
  addu("sys_reboots", sys.reboot_count);
  addu("sys_du_micros", sys.du_micros);
  add("sys_du_seconds", fmt_double(double(sys.du_micros) * 1e-6));
  addu("sys_dl_bytes", sys.dl_bytes);
  add("annual_basis", annual_basis);
  add("annual_rate", fmt_double(annual_rate));
  add("du_minutes_per_year", fmt_double(annual.du_minutes_per_year));
  add("dl_bytes_per_year", fmt_double(annual.dl_bytes_per_year));
  return kv;
}

namespace detail {

inline std::string render_kv(const KvList& kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

inline std::string rate_cell(std::uint64_t num, std::uint64_t den) {
  return den ? fmt_double(double(num) / double(den)) : std::string("na");
}

}  // namespace detail

// Writes summary.txt, counters.csv, breakdown_*.csv, injections.csv and,
// when event logging was on, events.csv.
inline void write_reports(const std::string& dir, const RunConfig& cfg,
                          const CampaignResult& result,
                          const SystemStats& sys, const AnnualRates& annual,
                          const std::string& annual_basis,
                          double annual_rate) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const CampaignCounters& c = result.counters;

  atomic_write(dir + "/summary.txt",
               detail::render_kv(summary_kv(cfg, result, sys, annual,
                                            annual_basis, annual_rate)));
  {
    std::string body = "counter,value\n";
    for (const auto& [k, v] : flatten_counters(c))
      body += k + "," + v + "\n";
    body += "sys_runs," + std::to_string(sys.runs) + "\n";
    body += "sys_reboots," + std::to_string(sys.reboot_count) + "\n";
    body += "sys_du_micros," + std::to_string(sys.du_micros) + "\n";
    body += "sys_dl_bytes," + std::to_string(sys.dl_bytes) + "\n";
    body += "stream_len," + std::to_string(result.stream_len) + "\n";
    atomic_write(dir + "/counters.csv", body);
  }
  {
    std::string body = "m,injected,du_faults,dl_faults,du_rate,dl_rate\n";
    for (unsigned m = 1; m <= CampaignCounters::kMaxM; ++m) {
      body += std::to_string(m) + "," + std::to_string(c.injected_by_m[m]) +
              "," + std::to_string(c.du_by_m[m]) + "," +
              std::to_string(c.dl_by_m[m]) + "," +
              detail::rate_cell(c.du_by_m[m], c.injected_by_m[m]) + "," +
              detail::rate_cell(c.dl_by_m[m], c.injected_by_m[m]) + "\n";
    }
    atomic_write(dir + "/breakdown_sizes.csv", body);
  }
  {
    std::string body = "source,du_faults,dl_events\n";
    for (int s = 0; s < int(FailureSource::Count_); ++s)
      body += std::string(source_name(FailureSource(s))) + "," +
              std::to_string(c.du_by_source[s]) + "," +
              std::to_string(c.dl_by_source[s]) + "\n";
    atomic_write(dir + "/breakdown_sources.csv", body);
  }
  {
    std::string body = "mask,count,share_of_injections\n";
    for (int m = 0; m < int(MaskKind::Count_); ++m)
      body += std::string(mask_name(MaskKind(m))) + "," +
              std::to_string(c.masks[m]) + "," +
              detail::rate_cell(c.masks[m], c.injections) + "\n";
    atomic_write(dir + "/breakdown_masking.csv", body);
  }
  {
    std::string body = "outcome,count,share_of_injections\n";
    for (int o = 0; o < int(OutcomeClass::Count_); ++o)
      body += std::string(outcome_name(OutcomeClass(o))) + "," +
              std::to_string(c.outcomes[o]) + "," +
              detail::rate_cell(c.outcomes[o], c.injections) + "\n";
    atomic_write(dir + "/breakdown_outcomes.csv", body);
  }
  {
    std::string body = "dl_kind,events,bytes,byte_share\n";
    for (int k = 0; k < int(DlKind::Count_); ++k)
      body += std::string(dl_name(DlKind(k))) + "," +
              std::to_string(c.dl_kind_count[k]) + "," +
              std::to_string(c.dl_kind_bytes[k]) + "," +
              detail::rate_cell(c.dl_kind_bytes[k], c.dl_bytes_total) + "\n";
    atomic_write(dir + "/breakdown_dl_kinds.csv", body);
  }
  atomic_write(
      dir + "/injections.csv",
      "controller,run,event_index,level,set,way,field,shape,m,first_bit,"
      "bucket\n" +
          result.injections_csv);
  if (cfg.event_log)
    atomic_write(dir + "/events.csv",
                 "controller,run,tick,kind,detail,bytes\n" + result.events_csv);
}

inline KvList load_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open summary: " + path);
  KvList kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("malformed summary line in " + path);
    kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return kv;
}

// Side-by-side table across report directories sharing one simulated
// geometry and workload. Columns follow the argument order.
inline std::string compare_reports(const std::vector<std::string>& dirs) {
  if (dirs.empty()) throw std::invalid_argument("no reports to compare");
  std::vector<std::map<std::string, std::string>> sums;
  for (const std::string& d : dirs) {
    const KvList kv = load_summary(d + "/summary.txt");
    sums.emplace_back(kv.begin(), kv.end());
  }
  for (const std::string& key : identity_keys()) {
    const auto it0 = sums[0].find(key);
    const std::string v0 =
        it0 == sums[0].end() ? std::string("<missing>") : it0->second;
    for (std::size_t i = 1; i < sums.size(); ++i) {
      const auto it = sums[i].find(key);
      const std::string v =
          it == sums[i].end() ? std::string("<missing>") : it->second;
      if (v != v0)
        throw std::runtime_error("reports disagree on " + key + ": '" + v0 +
                                 "' (" + dirs[0] + ") vs '" + v + "' (" +
                                 dirs[i] + ")");
    }
  }
  static const char* rows[] = {"scheme",
                               "interleave_ways",
                               "mbu",
                               "control_logic",
                               "redundancy",
                               "seed",
                               "n",
                               "injections",
                               "avf_sdc_tag_user",
                               "avf_sdc_data_user",
                               "avf_sdc_tag_nonuser",
                               "avf_sdc_data_nonuser",
                               "avf_due_tag",
                               "avf_due_data",
                               "ssvf_du_tag",
                               "ssvf_du_data",
                               "ssvf_dl_tag",
                               "ssvf_dl_data",
                               "reboots",
                               "benign_sdc",
                               "untouched",
                               "dl_bytes_controller",
                               "sys_du_seconds",
                               "sys_dl_bytes",
                               "du_minutes_per_year",
                               "dl_bytes_per_year"};
  std::string out = "metric";
  for (const std::string& d : dirs) out += "," + d;
  out += '\n';
  for (const char* key : rows) {
    out += key;
    for (const auto& s : sums) {
      const auto it = s.find(key);
      out += ',';
      out += it == s.end() ? std::string("na") : it->second;
    }
    out += '\n';
  }
  return out;
}

}  // namespace ssvf
