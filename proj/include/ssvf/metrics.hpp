#pragma once
// Campaign counters and the derived metric family. Counters are plain
// integers merged by addition, so shard merges are associative and a
// report built from merged shards is byte-identical to a serial run.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssvf/cache.hpp"
#include "ssvf/events.hpp"

namespace ssvf {

// Injection-time owner bucket: what the targeted line held when hit.
enum class TargetBucket : std::uint8_t { User = 0, NonUser = 1, InvalidLine = 2 };

inline const char* bucket_name(TargetBucket b) {
  switch (b) {
    case TargetBucket::User: return "user";
    case TargetBucket::NonUser: return "non_user";
    case TargetBucket::InvalidLine: return "invalid_line";
  }
  return "?";
}

// Upset-shape classes for the per-size breakdowns.
enum class UpsetShape : std::uint8_t { Single = 0, MultiBit = 1, MultiCell = 2 };

inline const char* shape_name(UpsetShape s) {
  switch (s) {
    case UpsetShape::Single: return "single_bit";
    case UpsetShape::MultiBit: return "multi_bit_word";
    case UpsetShape::MultiCell: return "multi_cell";
  }
  return "?";
}

struct CampaignCounters {
  static constexpr unsigned kMaxM = 4;

  std::uint64_t runs = 0;
  std::uint64_t injections = 0;

  std::uint64_t injected[2][3] = {};            // [field][TargetBucket]
  std::uint64_t injected_by_m[kMaxM + 1] = {};  // index by flip count, 1-based
  std::uint64_t injected_by_shape[3] = {};
  std::uint64_t injected_by_level[2] = {};

  std::uint64_t outcomes[std::size_t(OutcomeClass::Count_)] = {};
  std::uint64_t masks[std::size_t(MaskKind::Count_)] = {};

  std::uint64_t du_by_field[2] = {};  // distinct faults that caused a reboot
  std::uint64_t dl_by_field[2] = {};  // distinct faults that caused any DL
  std::uint64_t du_by_source[std::size_t(FailureSource::Count_)] = {};
  std::uint64_t dl_by_source[std::size_t(FailureSource::Count_)] = {};
  std::uint64_t du_by_m[kMaxM + 1] = {};
  std::uint64_t dl_by_m[kMaxM + 1] = {};

  std::uint64_t dl_kind_count[std::size_t(DlKind::Count_)] = {};
  std::uint64_t dl_kind_bytes[std::size_t(DlKind::Count_)] = {};
  std::uint64_t dl_bytes_total = 0;
  std::uint64_t dl_events_from_due = 0;  // must stay zero: detections never lose data

  std::uint64_t reboots = 0;
  std::uint64_t benign_sdc = 0;
  std::uint64_t untouched = 0;

  void merge(const CampaignCounters& o) {
    runs += o.runs;
    injections += o.injections;
    for (int f = 0; f < 2; ++f)
      for (int b = 0; b < 3; ++b) injected[f][b] += o.injected[f][b];
    for (unsigned m = 0; m <= kMaxM; ++m) {
      injected_by_m[m] += o.injected_by_m[m];
      du_by_m[m] += o.du_by_m[m];
      dl_by_m[m] += o.dl_by_m[m];
    }
    for (int s = 0; s < 3; ++s) injected_by_shape[s] += o.injected_by_shape[s];
    for (int l = 0; l < 2; ++l) injected_by_level[l] += o.injected_by_level[l];
    for (std::size_t i = 0; i < std::size_t(OutcomeClass::Count_); ++i)
      outcomes[i] += o.outcomes[i];
    for (std::size_t i = 0; i < std::size_t(MaskKind::Count_); ++i)
      masks[i] += o.masks[i];
    for (int f = 0; f < 2; ++f) {
      du_by_field[f] += o.du_by_field[f];
      dl_by_field[f] += o.dl_by_field[f];
    }
    for (std::size_t i = 0; i < std::size_t(FailureSource::Count_); ++i) {
      du_by_source[i] += o.du_by_source[i];
      dl_by_source[i] += o.dl_by_source[i];
    }
    for (std::size_t i = 0; i < std::size_t(DlKind::Count_); ++i) {
      dl_kind_count[i] += o.dl_kind_count[i];
      dl_kind_bytes[i] += o.dl_kind_bytes[i];
    }
    dl_bytes_total += o.dl_bytes_total;
    dl_events_from_due += o.dl_events_from_due;
    reboots += o.reboots;
    benign_sdc += o.benign_sdc;
    untouched += o.untouched;
  }

  std::uint64_t injected_on_field(FieldKind f) const {
    const auto fi = std::size_t(f);
    return injected[fi][0] + injected[fi][1] + injected[fi][2];
  }
  std::uint64_t du_total() const { return du_by_field[0] + du_by_field[1]; }
  std::uint64_t dl_total() const { return dl_by_field[0] + dl_by_field[1]; }
};

// Ratios are absent (nullopt) when their denominator is zero, never 0/0.
inline std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

// Architecture-style silent-corruption vulnerability: per field and per
// ownership class of the data hit.
inline std::optional<double> avf_sdc(const CampaignCounters& c, FieldKind f,
                                     bool user_data) {
  OutcomeClass oc;
  if (f == FieldKind::Tag)
    oc = user_data ? OutcomeClass::SdcTfUd : OutcomeClass::SdcTfNud;
  else
    oc = user_data ? OutcomeClass::SdcDfUd : OutcomeClass::SdcDfNud;
  const auto bucket = user_data ? TargetBucket::User : TargetBucket::NonUser;
  return ratio(c.outcomes[std::size_t(oc)],
               c.injected[std::size_t(f)][std::size_t(bucket)]);
}

// Detected-uncorrectable vulnerability per field, pooled over ownership:
// detection fires before the controller can know whose data it holds.
inline std::optional<double> avf_due(const CampaignCounters& c, FieldKind f) {
  const auto oc = f == FieldKind::Tag ? OutcomeClass::DueTf : OutcomeClass::DueDf;
  return ratio(c.outcomes[std::size_t(oc)], c.injected_on_field(f));
}

enum class FailureKind : std::uint8_t { Du = 0, Dl = 1 };

// System-level vulnerability: the fraction of faults on a field whose run
// ended in unavailability (Du) or data loss (Dl). Never-consumed faults
// stay in the denominator; sitting in a cache untouched is a real outcome.
inline std::optional<double> ssvf(const CampaignCounters& c, FailureKind k,
                                  FieldKind f) {
  const auto num = k == FailureKind::Du ? c.du_by_field[std::size_t(f)]
                                        : c.dl_by_field[std::size_t(f)];
  return ratio(num, c.injected_on_field(f));
}

struct BreakdownRow {
  std::string key;
  std::uint64_t count = 0;
  std::optional<double> share;  // of the section total
  std::optional<double> rate;   // per injection of the matching class
};

struct Breakdowns {
  std::vector<BreakdownRow> du_by_size;
  std::vector<BreakdownRow> dl_by_size;
  std::vector<BreakdownRow> du_by_source;
  std::vector<BreakdownRow> dl_by_source;
  std::vector<BreakdownRow> masking;
  std::vector<BreakdownRow> dl_kinds;  // count in .count, bytes in .rate slot? no: bytes carried separately
  std::vector<std::uint64_t> dl_kind_bytes;
};

inline Breakdowns breakdowns(const CampaignCounters& c) {
  Breakdowns b;
  for (unsigned m = 1; m <= CampaignCounters::kMaxM; ++m) {
    BreakdownRow du{std::to_string(m) + "_bit", c.du_by_m[m],
                    ratio(c.du_by_m[m], c.du_total()),
                    ratio(c.du_by_m[m], c.injected_by_m[m])};
    BreakdownRow dl{std::to_string(m) + "_bit", c.dl_by_m[m],
                    ratio(c.dl_by_m[m], c.dl_total()),
                    ratio(c.dl_by_m[m], c.injected_by_m[m])};
    b.du_by_size.push_back(du);
    b.dl_by_size.push_back(dl);
  }
  std::uint64_t du_src_total = 0, dl_src_total = 0;
  for (std::size_t i = 0; i < std::size_t(FailureSource::Count_); ++i) {
    du_src_total += c.du_by_source[i];
    dl_src_total += c.dl_by_source[i];
  }
  for (std::size_t i = 0; i < std::size_t(FailureSource::Count_); ++i) {
    b.du_by_source.push_back({source_name(FailureSource(i)), c.du_by_source[i],
                              ratio(c.du_by_source[i], du_src_total),
                              std::nullopt});
    b.dl_by_source.push_back({source_name(FailureSource(i)), c.dl_by_source[i],
                              ratio(c.dl_by_source[i], dl_src_total),
                              std::nullopt});
  }
  std::uint64_t mask_total = 0;
  for (std::size_t i = 0; i < std::size_t(MaskKind::Count_); ++i)
    mask_total += c.masks[i];
  for (std::size_t i = 0; i < std::size_t(MaskKind::Count_); ++i)
    b.masking.push_back({mask_name(MaskKind(i)), c.masks[i],
                         ratio(c.masks[i], mask_total), std::nullopt});
  for (std::size_t i = 0; i < std::size_t(DlKind::Count_); ++i) {
    b.dl_kinds.push_back({dl_name(DlKind(i)), c.dl_kind_count[i],
                          ratio(c.dl_kind_bytes[i], c.dl_bytes_total),
                          std::nullopt});
    b.dl_kind_bytes.push_back(c.dl_kind_bytes[i]);
  }
  return b;
}

}  // namespace ssvf
