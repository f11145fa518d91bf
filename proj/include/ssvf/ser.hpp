#pragma once
// Control-logic soft-error rate pipeline. Chain counts arrive as
// configuration (derived offline from area data); from there the rate math
// is linear: FIT per controller, expected events per year.
//
// A control-logic upset is modeled downstream as a tag fault the check
// logic never sees (forced silent), so campaigns in this mode produce no
// corrected or detected events at all.

#include <stdexcept>

#include "ssvf/system.hpp"

namespace ssvf {

struct LogicSerInputs {
  double l_gate_um = 0.05;
  double ser_per_chain_fit = 4.0e-5;  // FIT per 12-FO4 chain
  double chains_l1 = 125232;
  double chains_l2 = 756499;
  double chains_total = 1758362;

  static constexpr double kHoursPerYear = 8760.0;

  void validate() const {
    if (l_gate_um <= 0 || ser_per_chain_fit <= 0 || chains_l1 <= 0 ||
        chains_l2 <= 0 || chains_total <= 0)
      throw std::invalid_argument("logic SER inputs must be positive");
  }
};

// Inverter delay scale for the modeled process, in the same units the
// per-chain rate was calibrated against.
inline double fo4_delay(double l_gate_um) {
  if (l_gate_um <= 0)
    throw std::invalid_argument("gate length must be positive");
  return 360.0 * l_gate_um;
}

inline double controller_fit(double chain_count, double ser_per_chain_fit) {
  if (chain_count < 0 || ser_per_chain_fit < 0)
    throw std::invalid_argument("FIT inputs must be non-negative");
  return chain_count * ser_per_chain_fit;
}

// FIT is failures per 1e9 device-hours.
inline double annual_events(double fit) {
  if (fit < 0) throw std::invalid_argument("FIT must be non-negative");
  return fit * LogicSerInputs::kHoursPerYear / 1e9;
}

// Annualization for control-logic campaigns: the per-strike averages scale
// by the expected logic upsets per year rather than the SRAM strike rate.
inline AnnualRates annualize_logic(const SystemStats& s,
                                   double events_per_year) {
  if (s.runs == 0) throw std::invalid_argument("no runs to annualize");
  if (events_per_year < 0)
    throw std::invalid_argument("event rate must be non-negative");
  AnnualRates a;
  a.du_minutes_per_year = double(s.du_micros) * 1e-6 / double(s.runs) *
                          events_per_year / 60.0;
  a.dl_bytes_per_year =
      double(s.dl_bytes) / double(s.runs) * events_per_year;
  return a;
}

}  // namespace ssvf
