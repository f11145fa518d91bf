#pragma once
// Lifting controller events to storage-system unavailability and data loss.
//
// Each run models one particle strike. On the system wall clock, strike r
// lands in mission slot r, where a slot is the mean time between strikes
// (year / strikes-per-year). A rebooting controller is down for a fixed
// window placed uniformly inside its slot.
//
// Single controller: every reboot's full window counts as unavailability.
// Dual initiated: the peer absorbs load, so only time where both
// controllers' windows of the same slot overlap counts. Data loss is not
// absorbed by the peer and accrues from each controller unchanged.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "ssvf/rng.hpp"

namespace ssvf {

enum class RedundancyMode : std::uint8_t { Single, DualInitiated };

inline const char* redundancy_name(RedundancyMode m) {
  return m == RedundancyMode::Single ? "single" : "dual_initiated";
}

struct RedundancyConfig {
  RedundancyMode mode = RedundancyMode::Single;
  double reboot_seconds = 120.0;
  double seu_per_year = 1000.0;

  static constexpr double kYearSeconds = 365.0 * 86400.0;

  double slot_seconds() const { return kYearSeconds / seu_per_year; }

  void validate() const {
    if (reboot_seconds <= 0)
      throw std::invalid_argument("reboot_seconds must be positive");
    if (seu_per_year <= 0)
      throw std::invalid_argument("seu_per_year must be positive");
    if (mode == RedundancyMode::DualInitiated &&
        slot_seconds() <= reboot_seconds)
      throw std::invalid_argument(
          "dual mode needs the inter-strike interval to exceed the reboot "
          "window");
  }
};

struct SystemStats {
  std::uint64_t runs = 0;
  std::uint64_t reboot_count = 0;  // reboot events across controllers
  std::uint64_t du_micros = 0;     // system-level unavailability
  std::uint64_t dl_bytes = 0;      // system-level data loss
};

inline constexpr std::uint32_t kMissionStream = 0x6d736c74u;  // "mslt"

// Per-run outage onsets, drawn once per slot so both controllers land on
// one shared wall clock. Deterministic in (seed, run).
inline std::pair<std::uint64_t, std::uint64_t> slot_onsets_micros(
    std::uint64_t seed, std::uint64_t run, const RedundancyConfig& cfg) {
  Rng rng = Rng::derive(seed, kMissionStream, run);
  const double span = cfg.slot_seconds() - cfg.reboot_seconds;
  const double a = rng.uniform01() * span;
  const double b = rng.uniform01() * span;
  return {std::uint64_t(std::llround(a * 1e6)),
          std::uint64_t(std::llround(b * 1e6))};
}

inline SystemStats apply_single(const std::vector<std::uint8_t>& rebooted,
                                std::uint64_t dl_bytes,
                                const RedundancyConfig& cfg) {
  cfg.validate();
  SystemStats s;
  s.runs = rebooted.size();
  s.dl_bytes = dl_bytes;
  const std::uint64_t window_us =
      std::uint64_t(std::llround(cfg.reboot_seconds * 1e6));
  for (std::uint8_t r : rebooted)
    if (r) {
      s.reboot_count += 1;
      s.du_micros += window_us;
    }
  return s;
}

inline SystemStats apply_dual(const std::vector<std::uint8_t>& rebooted_a,
                              const std::vector<std::uint8_t>& rebooted_b,
                              std::uint64_t dl_bytes_a,
                              std::uint64_t dl_bytes_b,
                              const RedundancyConfig& cfg,
                              std::uint64_t seed) {
  cfg.validate();
  SystemStats s;
  s.runs = std::max(rebooted_a.size(), rebooted_b.size());
  s.dl_bytes = dl_bytes_a + dl_bytes_b;
  const std::uint64_t window_us =
      std::uint64_t(std::llround(cfg.reboot_seconds * 1e6));
  for (std::uint64_t r = 0; r < s.runs; ++r) {
    const bool a = r < rebooted_a.size() && rebooted_a[r];
    const bool b = r < rebooted_b.size() && rebooted_b[r];
    if (a) s.reboot_count += 1;
    if (b) s.reboot_count += 1;
    if (!a || !b) continue;
    const auto [onset_a, onset_b] = slot_onsets_micros(seed, r, cfg);
    const std::uint64_t gap =
        onset_a > onset_b ? onset_a - onset_b : onset_b - onset_a;
    if (gap < window_us) s.du_micros += window_us - gap;
  }
  return s;
}

struct AnnualRates {
  double du_minutes_per_year = 0;
  double dl_bytes_per_year = 0;
};

// Scale per-strike averages by the strike rate.
inline AnnualRates annualize(const SystemStats& s,
                             const RedundancyConfig& cfg) {
  if (s.runs == 0) throw std::invalid_argument("no runs to annualize");
  AnnualRates a;
  const double du_seconds = double(s.du_micros) * 1e-6;
  a.du_minutes_per_year =
      du_seconds / double(s.runs) * cfg.seu_per_year / 60.0;
  a.dl_bytes_per_year =
      double(s.dl_bytes) / double(s.runs) * cfg.seu_per_year;
  return a;
}

}  // namespace ssvf
