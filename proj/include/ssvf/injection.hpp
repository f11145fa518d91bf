#pragma once
// Campaign sizing and per-run fault placement.
//
// Placement is a fixed draw sequence so a run is reproducible from
// (seed, run index) alone: event index, then level weighted by line count,
// then set, way, field weighted by bit width, then upset size and position.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ssvf/cache.hpp"
#include "ssvf/ecc.hpp"
#include "ssvf/metrics.hpp"
#include "ssvf/rng.hpp"

namespace ssvf {

// Runs needed for a proportion estimate at margin `e` and confidence
// quantile `z`, worst case `p`. `population` of zero means unbounded.
inline std::uint64_t sample_size(double e, double z, double p,
                                 std::uint64_t population = 0) {
  if (e <= 0 || z <= 0) throw std::invalid_argument("e and z must be positive");
  if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0, 1]");
  double n = z * z * p * (1.0 - p) / (e * e);
  if (population > 0) n = n / (1.0 + (n - 1.0) / double(population));
  if (n < 1.0) n = 1.0;
  // Nudge below the integer boundary first: the quotient above lands a few
  // ulp high for exact cases and a bare ceil would overshoot by one.
  return static_cast<std::uint64_t>(std::ceil(n - 1e-9));
}

// How many bits one particle strike flips and how they land.
struct MbuDistribution {
  enum class Kind : std::uint8_t { Contiguous, PlacedMcu };

  Kind kind = Kind::Contiguous;

  // Contiguous: size_probs[i] is the probability of an (i+1)-bit run.
  std::vector<double> size_probs{1.0};

  // PlacedMcu: single / multi-cell / multi-bit rates per level, where the
  // multi-bit (in-word) rate is a subset of the multi-cell rate.
  struct McuRates {
    double p_single = 1.0;
    double p_mcu = 0.0;
    double p_mbu = 0.0;
  };
  McuRates l1{};
  McuRates l2{};

  static MbuDistribution contiguous(std::vector<double> probs) {
    MbuDistribution d;
    d.kind = Kind::Contiguous;
    d.size_probs = std::move(probs);
    d.validate();
    return d;
  }

  static MbuDistribution single_bit() { return contiguous({1.0}); }

  static MbuDistribution placed_mcu(McuRates l1, McuRates l2) {
    MbuDistribution d;
    d.kind = Kind::PlacedMcu;
    d.l1 = l1;
    d.l2 = l2;
    d.validate();
    return d;
  }

  void validate() const {
    if (kind == Kind::Contiguous) {
      if (size_probs.empty() ||
          size_probs.size() > CampaignCounters::kMaxM)
        throw std::invalid_argument("size distribution supports runs of 1 to " +
                                    std::to_string(CampaignCounters::kMaxM) +
                                    " bits");
      double sum = 0;
      for (double p : size_probs) {
        if (p < 0) throw std::invalid_argument("negative size probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("size probabilities must sum to 1");
    } else {
      for (const McuRates& r : {l1, l2}) {
        if (r.p_single < 0 || r.p_mcu < 0 || r.p_mbu < 0)
          throw std::invalid_argument("negative upset rate");
        if (std::abs(r.p_single + r.p_mcu - 1.0) > 1e-6)
          throw std::invalid_argument("single and multi-cell rates must sum to 1");
        if (r.p_mbu > r.p_mcu + 1e-12)
          throw std::invalid_argument("multi-bit rate exceeds multi-cell rate");
      }
    }
  }
};

struct InjectionConfig {
  MbuDistribution dist{};
  // Field selection weights; defaults follow the stored bit widths.
  double tag_weight = 0;   // 0 means use tag_bits
  double data_weight = 0;  // 0 means use data_bits
  // Control-path mode: every fault is a tag fault treated as silently wrong.
  bool forced_sdc_tags = false;
};

struct BlockSlice {
  Level level;
  std::uint32_t set;
  std::uint32_t way;
  FieldKind field;
  ErrorPattern pattern;
};

struct FaultDraw {
  std::uint64_t event_index = 0;  // stream position it lands before
  Level level = Level::L1;
  FieldKind field = FieldKind::Data;
  UpsetShape shape = UpsetShape::Single;
  std::uint8_t drawn_m = 1;
  std::vector<BlockSlice> slices;  // one, or two when straddling blocks
};

namespace detail {

inline std::uint8_t draw_run_length(Rng& rng,
                                    const std::vector<double>& probs) {
  const double r = rng.uniform01();
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (r < acc) return std::uint8_t(i + 1);
  }
  return std::uint8_t(probs.size());
}

}  // namespace detail

// One fault placement. The stream length bounds the event index draw.
inline FaultDraw draw_fault(Rng& rng, const CacheGeometry& geom,
                            const InjectionConfig& cfg,
                            std::uint64_t stream_len) {
  if (stream_len == 0) throw std::invalid_argument("empty access stream");
  FaultDraw d;
  d.event_index = rng.below(stream_len);

  const std::uint64_t l1_lines = geom.lines(Level::L1);
  const std::uint64_t l2_lines = geom.lines(Level::L2);
  d.level = rng.below(l1_lines + l2_lines) < l1_lines ? Level::L1 : Level::L2;
  const std::uint32_t sets = geom.sets(d.level);
  const std::uint32_t ways = geom.ways(d.level);
  const std::uint32_t set = std::uint32_t(rng.below(sets));
  const std::uint32_t way = std::uint32_t(rng.below(ways));

  if (cfg.forced_sdc_tags) {
    d.field = FieldKind::Tag;
  } else {
    const double tw = cfg.tag_weight > 0 ? cfg.tag_weight : geom.tag_bits;
    const double dw = cfg.data_weight > 0 ? cfg.data_weight : geom.data_bits();
    d.field = rng.uniform01() * (tw + dw) < tw ? FieldKind::Tag
                                               : FieldKind::Data;
  }
  const unsigned field_bits =
      d.field == FieldKind::Tag ? geom.tag_bits : geom.data_bits();

  if (cfg.dist.kind == MbuDistribution::Kind::Contiguous ||
      cfg.forced_sdc_tags) {
    d.drawn_m = cfg.forced_sdc_tags
                    ? 1
                    : detail::draw_run_length(rng, cfg.dist.size_probs);
    if (d.drawn_m > field_bits)
      d.drawn_m = std::uint8_t(field_bits);
    d.shape = d.drawn_m == 1 ? UpsetShape::Single : UpsetShape::MultiBit;
    const std::uint64_t positions = field_bits - d.drawn_m + 1;
    const unsigned first = unsigned(rng.below(positions));
    d.slices.push_back({d.level, set, way, d.field,
                        ErrorPattern{d.drawn_m, first}});
    return d;
  }

  // Placed multi-cell model: strikes are single bits, in-word pairs, or
  // pairs landing in physically adjacent blocks.
  const MbuDistribution::McuRates& r =
      d.level == Level::L1 ? cfg.dist.l1 : cfg.dist.l2;
  const double u = rng.uniform01();
  if (u < r.p_single) {
    d.drawn_m = 1;
    d.shape = UpsetShape::Single;
    const unsigned first = unsigned(rng.below(field_bits));
    d.slices.push_back({d.level, set, way, d.field,
                        ErrorPattern{1, first}});
    return d;
  }
  d.drawn_m = 2;
  if (u < r.p_single + r.p_mbu) {
    // In-word pair: two adjacent bits inside one word (or inside the tag).
    d.shape = UpsetShape::MultiBit;
    unsigned first;
    if (d.field == FieldKind::Data) {
      const unsigned word = unsigned(rng.below(geom.words_per_line()));
      const unsigned in_word = unsigned(rng.below(geom.word_bits() - 1));
      first = word * geom.word_bits() + in_word;
    } else {
      first = unsigned(rng.below(geom.tag_bits - 1));
    }
    d.slices.push_back({d.level, set, way, d.field, ErrorPattern{2, first}});
    return d;
  }
  // Adjacent-cell pair across a block boundary.
  d.shape = UpsetShape::MultiCell;
  if (d.field == FieldKind::Data) {
    // Last bit of one word, first bit of the next; the final word chains
    // into the neighbouring set's line.
    const unsigned word = unsigned(rng.below(geom.words_per_line()));
    if (word + 1 < geom.words_per_line()) {
      const unsigned first = (word + 1) * geom.word_bits() - 1;
      d.slices.push_back({d.level, set, way, d.field, ErrorPattern{2, first}});
    } else {
      d.slices.push_back({d.level, set, way, d.field,
                          ErrorPattern{1, geom.data_bits() - 1}});
      d.slices.push_back({d.level, (set + 1) % sets, way, d.field,
                          ErrorPattern{1, 0}});
    }
  } else {
    // Last tag bit of one way, first tag bit of the next; the final way
    // chains into the neighbouring set's way zero.
    d.slices.push_back({d.level, set, way, d.field,
                        ErrorPattern{1, geom.tag_bits - 1}});
    if (way + 1 < ways)
      d.slices.push_back({d.level, set, way + 1, d.field, ErrorPattern{1, 0}});
    else
      d.slices.push_back({d.level, (set + 1) % sets, 0, d.field,
                          ErrorPattern{1, 0}});
  }
  return d;
}

}  // namespace ssvf
