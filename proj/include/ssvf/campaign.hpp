#pragma once
// Statistical injection campaigns: n runs, one strike per run, full stream
// replay around the strike. Every random draw derives from (seed, purpose,
// run index, controller), so a campaign's numbers do not depend on worker
// count or scheduling; shards merge by plain addition in run order.

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ssvf/consequence.hpp"
#include "ssvf/engine.hpp"
#include "ssvf/injection.hpp"
#include "ssvf/metrics.hpp"
#include "ssvf/workload.hpp"

namespace ssvf {

inline constexpr std::uint32_t kFaultStreamBase = 0x66647277u;     // "fdrw"
inline constexpr std::uint32_t kManifestStreamBase = 0x6d667374u;  // "mfst"

struct CampaignPlan {
  CacheGeometry geom{};
  AddressMap map{};
  ProtectionScheme scheme = ProtectionScheme::make(SchemeKind::Secded);
  InjectionConfig injection{};
  ManifestationParams manifestation{};
  EngineConfig engine{};
  std::uint64_t runs = 0;
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;
  std::uint32_t controller_id = 0;
  bool log_events = false;

  void validate() const {
    geom.validate();
    scheme.validate();
    injection.dist.validate();
    manifestation.validate();
    if (map.user_bytes == 0)
      throw std::invalid_argument("address map has no user region");
    if (runs == 0) throw std::invalid_argument("runs must be positive");
    if (workers == 0) throw std::invalid_argument("workers must be positive");
  }
};

struct CampaignResult {
  CampaignCounters counters{};
  std::vector<std::uint8_t> rebooted;
  std::uint64_t stream_len = 0;
  std::string injections_csv;
  std::string events_csv;
};

namespace detail {

inline void append_row(std::string& out, const char* fmt, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, fmt);
  const int n = std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  if (n > 0) out.append(buf, std::size_t(std::min<int>(n, sizeof buf - 1)));
}

inline bool run_one(const CampaignPlan& plan,
                    const std::vector<AccessEvent>& stream, std::uint64_t run,
                    AccessEngine& engine, CampaignCounters& counters,
                    std::string& inj_rows, std::string& ev_rows) {
  Rng fault_rng =
      Rng::derive(plan.seed, kFaultStreamBase + plan.controller_id, run);
  const FaultDraw d =
      draw_fault(fault_rng, plan.geom, plan.injection, stream.size());

  ConsequenceTracker tracker(
      plan.geom, plan.scheme, plan.manifestation, counters,
      Rng::derive(plan.seed, kManifestStreamBase + plan.controller_id, run));
  if (plan.log_events)
    tracker.set_event_sink([&ev_rows, run, &plan](const TrackedEvent& e) {
      append_row(ev_rows, "%u,%llu,%llu,%s,%s,%llu\n", plan.controller_id,
                 (unsigned long long)run, (unsigned long long)e.tick, e.kind,
                 e.detail, (unsigned long long)e.bytes);
    });

  engine.reset();
  engine.set_tracker(&tracker);
  counters.runs += 1;

  for (std::uint64_t i = 0; i < d.event_index; ++i)
    engine.access(stream[i], i);

  // The strike lands between stream positions.
  tracker.set_tick(d.event_index);
  const BlockSlice& s0 = d.slices.front();
  CacheLevel& prim = s0.level == Level::L1 ? engine.l1() : engine.l2();
  const CacheLine& ln0 = prim.at(s0.set, s0.way);
  const TargetBucket bucket =
      !state_present(ln0.state)
          ? TargetBucket::InvalidLine
          : (ln0.owner == Ownership::UserData ? TargetBucket::User
                                              : TargetBucket::NonUser);
  const std::uint32_t group =
      tracker.begin_group(d.drawn_m, d.shape, d.field, d.level, bucket);
  for (const BlockSlice& s : d.slices) {
    CacheLevel& lvl = s.level == Level::L1 ? engine.l1() : engine.l2();
    if (!tracker.attach(lvl, s.set, s.way, s.field, s.pattern,
                        plan.injection.forced_sdc_tags, group, plan.map))
      throw std::logic_error("fault slice collided with a live fault");
  }
  append_row(inj_rows, "%u,%llu,%llu,%s,%u,%u,%s,%s,%u,%u,%s\n",
             plan.controller_id, (unsigned long long)run,
             (unsigned long long)d.event_index, level_name(d.level), s0.set,
             s0.way, field_name(d.field), shape_name(d.shape),
             unsigned(d.drawn_m), s0.pattern.first_bit, bucket_name(bucket));

  bool rebooted = false;
  for (std::uint64_t i = d.event_index; i < stream.size(); ++i) {
    tracker.set_tick(i);
    if (engine.access(stream[i], i)) {
      rebooted = true;
      tracker.on_reboot_flush();
      engine.reset();
    }
  }
  tracker.finalize();
  engine.set_tracker(nullptr);
  return rebooted;
}

}  // namespace detail

inline CampaignResult run_campaign(const CampaignPlan& plan,
                                   const std::vector<AccessEvent>& stream) {
  plan.validate();
  if (stream.empty()) throw std::invalid_argument("empty access stream");

  CampaignResult res;
  res.stream_len = stream.size();
  res.rebooted.assign(plan.runs, 0);

  const std::uint32_t workers =
      std::uint32_t(std::min<std::uint64_t>(plan.workers, plan.runs));
  std::vector<CampaignCounters> shard_counters(workers);
  std::vector<std::string> shard_inj(workers), shard_ev(workers);
  std::vector<std::exception_ptr> errors(workers);

  auto body = [&](std::uint32_t w) {
    try {
      const std::uint64_t lo = plan.runs * w / workers;
      const std::uint64_t hi = plan.runs * (w + 1) / workers;
      AccessEngine engine(plan.geom, plan.map, plan.engine);
      for (std::uint64_t r = lo; r < hi; ++r)
        res.rebooted[r] = detail::run_one(plan, stream, r, engine,
                                          shard_counters[w], shard_inj[w],
                                          shard_ev[w])
                              ? 1
                              : 0;
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w)
      pool.emplace_back(body, w);
    for (std::thread& t : pool) t.join();
  }
  for (std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  // Row text only; the report layer adds headers so dual-controller rows
  // concatenate cleanly.
  for (std::uint32_t w = 0; w < workers; ++w) {
    res.counters.merge(shard_counters[w]);
    res.injections_csv += shard_inj[w];
    if (plan.log_events) res.events_csv += shard_ev[w];
  }
  return res;
}

}  // namespace ssvf
