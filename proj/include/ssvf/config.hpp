#pragma once
// Run configuration: a flat key=value text file, with every knob also
// overridable from the command line (overrides win). Unknown keys are
// errors; validation failures name the offending field.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssvf/cache.hpp"
#include "ssvf/consequence.hpp"
#include "ssvf/ecc.hpp"
#include "ssvf/injection.hpp"
#include "ssvf/ser.hpp"
#include "ssvf/system.hpp"
#include "ssvf/workload.hpp"

namespace ssvf {

enum class WorkloadSource : std::uint8_t { Synthetic, Trace };

struct RunConfig {
  CacheGeometry geom{};
  double phys_mb = 16.0;
  double user_fraction = 0.0625;
  double os_fraction = 0.25;

  SchemeKind scheme_kind = SchemeKind::Secded;
  unsigned interleave_ways = 0;  // 0 keeps the scheme's default

  WorkloadSource source = WorkloadSource::Synthetic;
  std::string trace_path;
  SyntheticSpec synth{};
  std::uint64_t workload_seed = 0;  // 0 ties it to the campaign seed
  ExpandSpec expand{};
  bool user_fill_l2_only = false;

  std::string mbu_name = "single";
  MbuDistribution dist = MbuDistribution::single_bit();
  double tag_weight = 0;
  double data_weight = 0;
  bool control_logic = false;

  ManifestationParams manifestation{};
  RedundancyConfig redundancy{};
  LogicSerInputs logic{};

  std::uint64_t n = 0;  // 0 selects the statistical auto size
  double margin = 0.01;
  double confidence_z = 1.96;
  double worst_p = 0.5;
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;
  bool event_log = false;
  std::string out_dir = "out";

  ProtectionScheme scheme() const {
    return ProtectionScheme::make(scheme_kind, interleave_ways);
  }

  AddressMap address_map() const {
    return AddressMap::from_fractions(
        std::uint64_t(phys_mb * 1024.0 * 1024.0), user_fraction, os_fraction,
        geom.line_bytes);
  }

  std::uint64_t effective_runs() const {
    return n > 0 ? n : sample_size(margin, confidence_z, worst_p);
  }

  std::uint64_t effective_workload_seed() const {
    return workload_seed > 0 ? workload_seed : seed;
  }

  void validate() const {
    auto fieldfail = [](const std::string& field, const std::string& what) {
      throw std::invalid_argument(field + ": " + what);
    };
    try {
      geom.validate();
    } catch (const std::exception& e) {
      fieldfail("geometry", e.what());
    }
    if (phys_mb <= 0) fieldfail("phys_mb", "must be positive");
    if (user_fraction <= 0 || user_fraction > 1)
      fieldfail("user_fraction", "must lie in (0, 1]");
    if (os_fraction < 0 || user_fraction + os_fraction > 1)
      fieldfail("os_fraction", "user and OS fractions must fit in 1");
    try {
      scheme().validate();
    } catch (const std::exception& e) {
      fieldfail("scheme", e.what());
    }
    if (source == WorkloadSource::Trace && trace_path.empty())
      fieldfail("workload", "trace path is empty");
    try {
      synth.validate();
    } catch (const std::exception& e) {
      fieldfail("workload", e.what());
    }
    try {
      expand.validate();
    } catch (const std::exception& e) {
      fieldfail("os_overhead", e.what());
    }
    try {
      dist.validate();
    } catch (const std::exception& e) {
      fieldfail("mbu", e.what());
    }
    if (tag_weight < 0) fieldfail("tag_weight", "must be non-negative");
    if (data_weight < 0) fieldfail("data_weight", "must be non-negative");
    try {
      manifestation.validate();
    } catch (const std::exception& e) {
      fieldfail("manifestation", e.what());
    }
    try {
      redundancy.validate();
    } catch (const std::exception& e) {
      fieldfail("redundancy", e.what());
    }
    try {
      logic.validate();
    } catch (const std::exception& e) {
      fieldfail("logic_ser", e.what());
    }
    if (n == 0) {
      if (margin <= 0) fieldfail("margin", "must be positive");
      if (confidence_z <= 0) fieldfail("confidence_z", "must be positive");
      if (worst_p < 0 || worst_p > 1)
        fieldfail("worst_p", "must lie in [0, 1]");
    }
    if (workers == 0) fieldfail("workers", "must be positive");
    if (out_dir.empty()) fieldfail("out_dir", "must not be empty");
    // The synthetic span must fit the user region.
    const AddressMap m = address_map();
    if (source == WorkloadSource::Synthetic &&
        synth.size_kb * 1024 > m.user_bytes)
      fieldfail("workload", "request size exceeds the user region");
  }
};

inline SchemeKind scheme_from_name(const std::string& s) {
  if (s == "none") return SchemeKind::None;
  if (s == "parity") return SchemeKind::Parity;
  if (s == "interleaved_parity") return SchemeKind::InterleavedParity;
  if (s == "secded") return SchemeKind::Secded;
  if (s == "interleaved_secded") return SchemeKind::InterleavedSecded;
  if (s == "dected") return SchemeKind::Dected;
  throw std::invalid_argument(
      "scheme: unknown name '" + s +
      "' (none, parity, interleaved_parity, secded, interleaved_secded, "
      "dected)");
}

// Named upset-size presets from published SRAM measurement campaigns.
inline MbuDistribution mbu_preset(const std::string& name) {
  if (name == "single") return MbuDistribution::single_bit();
  if (name == "dixit")
    return MbuDistribution::contiguous({0.62, 0.25, 0.07, 0.06});
  if (name == "oliveira")
    return MbuDistribution::placed_mcu({0.73, 0.27, 0.075},
                                       {0.68, 0.32, 0.06});
  throw std::invalid_argument("mbu: unknown preset '" + name +
                              "' (single, dixit, oliveira)");
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not a number: '" + v + "'");
  }
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return u;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not an integer: '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

}  // namespace detail

// Apply one key=value setting. Shared between the file parser and the
// command-line override path.
inline void apply_setting(RunConfig& c, const std::string& key,
                          const std::string& value) {
  using detail::to_bool;
  using detail::to_double;
  using detail::to_u64;
  if (key == "l1_sets")
    c.geom.l1_sets = std::uint32_t(to_u64(key, value));
  else if (key == "l1_ways")
    c.geom.l1_ways = std::uint32_t(to_u64(key, value));
  else if (key == "l2_sets")
    c.geom.l2_sets = std::uint32_t(to_u64(key, value));
  else if (key == "l2_ways")
    c.geom.l2_ways = std::uint32_t(to_u64(key, value));
  else if (key == "line_bytes")
    c.geom.line_bytes = std::uint32_t(to_u64(key, value));
  else if (key == "word_bytes")
    c.geom.word_bytes = std::uint32_t(to_u64(key, value));
  else if (key == "tag_bits")
    c.geom.tag_bits = std::uint32_t(to_u64(key, value));
  else if (key == "phys_mb")
    c.phys_mb = to_double(key, value);
  else if (key == "user_fraction")
    c.user_fraction = to_double(key, value);
  else if (key == "os_fraction")
    c.os_fraction = to_double(key, value);
  else if (key == "scheme")
    c.scheme_kind = scheme_from_name(value);
  else if (key == "interleave_ways")
    c.interleave_ways = unsigned(to_u64(key, value));
  else if (key == "workload") {
    if (value == "synthetic") {
      c.source = WorkloadSource::Synthetic;
    } else {
      c.source = WorkloadSource::Trace;
      c.trace_path = value;
    }
  } else if (key == "requests")
    c.synth.requests = to_u64(key, value);
  else if (key == "request_kb")
    c.synth.size_kb = to_u64(key, value);
  else if (key == "inter_arrival_us")
    c.synth.inter_arrival_us = to_double(key, value);
  else if (key == "pattern") {
    if (value == "sequential")
      c.synth.pattern = AddressPattern::Sequential;
    else if (value == "random")
      c.synth.pattern = AddressPattern::Random;
    else
      throw std::invalid_argument("pattern: expected sequential or random");
  } else if (key == "read_fraction")
    c.synth.read_fraction = to_double(key, value);
  else if (key == "workload_seed")
    c.workload_seed = to_u64(key, value);
  else if (key == "os_overhead_ratio")
    c.expand.os_overhead_ratio = to_double(key, value);
  else if (key == "os_write_fraction")
    c.expand.os_write_fraction = to_double(key, value);
  else if (key == "user_fill") {
    if (value == "l1")
      c.user_fill_l2_only = false;
    else if (value == "l2_only")
      c.user_fill_l2_only = true;
    else
      throw std::invalid_argument("user_fill: expected l1 or l2_only");
  } else if (key == "mbu") {
    c.dist = mbu_preset(value);
    c.mbu_name = value;
  } else if (key == "mbu_probs") {
    std::vector<double> probs;
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
      probs.push_back(to_double(key, item));
    c.dist = MbuDistribution::contiguous(std::move(probs));
    c.mbu_name = "custom";
  } else if (key == "tag_weight")
    c.tag_weight = to_double(key, value);
  else if (key == "data_weight")
    c.data_weight = to_double(key, value);
  else if (key == "control_logic")
    c.control_logic = to_bool(key, value);
  else if (key == "p_not_manifest")
    c.manifestation.p_not_manifest = to_double(key, value);
  else if (key == "p_os_dl")
    c.manifestation.p_os_dl = to_double(key, value);
  else if (key == "redundancy") {
    if (value == "single")
      c.redundancy.mode = RedundancyMode::Single;
    else if (value == "dual")
      c.redundancy.mode = RedundancyMode::DualInitiated;
    else
      throw std::invalid_argument("redundancy: expected single or dual");
  } else if (key == "reboot_seconds")
    c.redundancy.reboot_seconds = to_double(key, value);
  else if (key == "seu_per_year")
    c.redundancy.seu_per_year = to_double(key, value);
  else if (key == "l_gate_um")
    c.logic.l_gate_um = to_double(key, value);
  else if (key == "ser_per_chain_fit")
    c.logic.ser_per_chain_fit = to_double(key, value);
  else if (key == "chains_l1")
    c.logic.chains_l1 = to_double(key, value);
  else if (key == "chains_l2")
    c.logic.chains_l2 = to_double(key, value);
  else if (key == "chains_total")
    c.logic.chains_total = to_double(key, value);
  else if (key == "n") {
    if (value == "auto")
      c.n = 0;
    else
      c.n = to_u64(key, value);
  } else if (key == "margin")
    c.margin = to_double(key, value);
  else if (key == "confidence_z")
    c.confidence_z = to_double(key, value);
  else if (key == "worst_p")
    c.worst_p = to_double(key, value);
  else if (key == "seed")
    c.seed = to_u64(key, value);
  else if (key == "workers")
    c.workers = std::uint32_t(to_u64(key, value));
  else if (key == "event_log")
    c.event_log = to_bool(key, value);
  else if (key == "out_dir")
    c.out_dir = value;
  else
    throw std::invalid_argument("unknown key '" + key + "'");
}

inline RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // Trim.
    const auto notspace = [](unsigned char ch) { return !std::isspace(ch); };
    while (!line.empty() && !notspace(line.back())) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && !notspace(line[start])) ++start;
    if (start == line.size()) continue;
    const std::size_t eq = line.find('=', start);
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = line.substr(start, eq - start);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && !notspace(key.back())) key.pop_back();
    std::size_t vs = 0;
    while (vs < value.size() && !notspace(value[vs])) ++vs;
    value.erase(0, vs);
    try {
      apply_setting(c, key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return c;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace ssvf
