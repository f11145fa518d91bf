#pragma once
// Top-level orchestration: configuration to finished report directory.
// One campaign per controller; dual mode runs a second controller with
// independent fault sub-seeds over its own copy of the workload.

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssvf/campaign.hpp"
#include "ssvf/config.hpp"
#include "ssvf/report.hpp"
#include "ssvf/ser.hpp"
#include "ssvf/system.hpp"
#include "ssvf/workload.hpp"

namespace ssvf {

inline std::vector<Request> build_requests(const RunConfig& cfg,
                                           const AddressMap& map) {
  if (cfg.source == WorkloadSource::Synthetic) {
    SyntheticSpec s = cfg.synth;
    s.seed = cfg.effective_workload_seed();
    return gen_synthetic(s, map);
  }
  std::ifstream in(cfg.trace_path);
  if (!in)
    throw std::runtime_error("cannot open trace file: " + cfg.trace_path);
  return parse_trace(in, map);
}

inline std::vector<AccessEvent> build_stream_for(const RunConfig& cfg,
                                                 const AddressMap& map) {
  ExpandSpec e = cfg.expand;
  e.seed = cfg.effective_workload_seed();
  return build_stream(build_requests(cfg, map), cfg.geom, map, e);
}

inline CampaignPlan make_plan(const RunConfig& cfg,
                              std::uint32_t controller_id) {
  CampaignPlan p;
  p.geom = cfg.geom;
  p.map = cfg.address_map();
  p.scheme = cfg.scheme();
  p.injection.dist = cfg.dist;
  p.injection.tag_weight = cfg.tag_weight;
  p.injection.data_weight = cfg.data_weight;
  p.injection.forced_sdc_tags = cfg.control_logic;
  p.manifestation = cfg.manifestation;
  p.engine.user_fill_l2_only = cfg.user_fill_l2_only;
  p.runs = cfg.effective_runs();
  p.seed = cfg.seed;
  p.workers = cfg.workers;
  p.controller_id = controller_id;
  p.log_events = cfg.event_log;
  return p;
}

struct DriverOutput {
  CampaignResult combined;  // dual mode: counters merged, rows concatenated
  SystemStats sys{};
  AnnualRates annual{};
  std::string annual_basis;
  double annual_rate = 0;
};

inline DriverOutput run_configured(const RunConfig& cfg) {
  cfg.validate();
  const AddressMap map = cfg.address_map();
  const std::vector<AccessEvent> stream = build_stream_for(cfg, map);

  DriverOutput out;
  CampaignResult a = run_campaign(make_plan(cfg, 0), stream);
  if (cfg.redundancy.mode == RedundancyMode::Single) {
    out.sys =
        apply_single(a.rebooted, a.counters.dl_bytes_total, cfg.redundancy);
    out.combined = std::move(a);
  } else {
    CampaignResult b = run_campaign(make_plan(cfg, 1), stream);
    out.sys = apply_dual(a.rebooted, b.rebooted, a.counters.dl_bytes_total,
                         b.counters.dl_bytes_total, cfg.redundancy, cfg.seed);
    a.counters.merge(b.counters);
    a.injections_csv += b.injections_csv;
    a.events_csv += b.events_csv;
    out.combined = std::move(a);
  }
  if (cfg.control_logic) {
    out.annual_basis = "logic_events";
    out.annual_rate = annual_events(
        controller_fit(cfg.logic.chains_total, cfg.logic.ser_per_chain_fit));
    out.annual = annualize_logic(out.sys, out.annual_rate);
  } else {
    out.annual_basis = "seu_per_year";
    out.annual_rate = cfg.redundancy.seu_per_year;
    out.annual = annualize(out.sys, cfg.redundancy);
  }
  return out;
}

inline void run_and_report(const RunConfig& cfg) {
  const DriverOutput o = run_configured(cfg);
  write_reports(cfg.out_dir, cfg, o.combined, o.sys, o.annual,
                o.annual_basis, o.annual_rate);
}

}  // namespace ssvf
