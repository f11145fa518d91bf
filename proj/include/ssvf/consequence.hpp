#pragma once
// Controller reaction to ECC check results on accesses that touch a faulty
// block, and the bookkeeping that turns those reactions into counters.
//
// Decision table, per access kind (tag consulted before data):
//   read   tag  Dce -> correct    Due -> reboot          Sdc -> stale-word DL (user)
//                                                               or manifestation (non-user)
//   read   data Dce -> correct    Due -> refetch if the line is clean,
//                                        reboot if dirty  Sdc -> word DL / manifestation
//   write  tag  Dce -> correct    Due -> reboot          Sdc -> word joins overwritten set
//   write  data     overlapped flips are overwritten; no ECC check
//   update tag  Dce -> correct    Due -> reboot          Sdc -> masked, line is wholly new
//   update data     masked; no ECC check
//   evict  clean/invalid: replaced silently, every fault on the line masks
//   evict  dirty: write-back checks both fields; any Due -> reboot,
//                 Dce corrects, surviving Sdc propagates one level down
//
// Silent corruption on a dirty user line additionally books data loss the
// moment it lands: the cache then holds the only copy.

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ssvf/cache.hpp"
#include "ssvf/ecc.hpp"
#include "ssvf/events.hpp"
#include "ssvf/metrics.hpp"
#include "ssvf/rng.hpp"

namespace ssvf {

// Stale bytes a remapped dirty line loses at write-back: whatever was not
// rewritten under the new address.
inline std::uint64_t dl_magnitude(std::uint64_t line_bytes,
                                  std::uint64_t overwritten_words,
                                  std::uint64_t word_bytes) {
  if (overwritten_words * word_bytes > line_bytes)
    throw std::invalid_argument("overwritten words exceed the line");
  return line_bytes - overwritten_words * word_bytes;
}

// Outcome probabilities for silent corruption consumed by non-user code.
struct ManifestationParams {
  double p_not_manifest = 0.304;
  double p_os_dl = 0.00025;

  void validate() const {
    if (p_not_manifest < 0 || p_not_manifest > 1 || p_os_dl < 0 || p_os_dl > 1)
      throw std::invalid_argument("manifestation probabilities must lie in [0, 1]");
  }
};

struct FaultRecord {
  Level level = Level::L1;
  std::uint32_t set = 0;
  std::uint32_t way = 0;
  FieldKind field = FieldKind::Data;
  bool force_sdc = false;
  bool live = true;
  std::uint32_t group = 0;
};

enum class TrackerAction : std::uint8_t { None, InvalidateRefetch, Reboot };

struct TrackedEvent {
  std::uint64_t tick;
  const char* kind;    // "outcome" | "mask" | "dl" | "du"
  const char* detail;
  std::uint64_t bytes;
};

class ConsequenceTracker {
 public:
  ConsequenceTracker(const CacheGeometry& geom, ProtectionScheme scheme,
                     ManifestationParams params, CampaignCounters& counters,
                     Rng manifest_rng)
      : geom_(geom),
        scheme_(scheme),
        params_(params),
        counters_(&counters),
        rng_(manifest_rng) {
    params_.validate();
    scheme_.validate();
  }

  void set_event_sink(std::function<void(const TrackedEvent&)> sink) {
    sink_ = std::move(sink);
  }
  void set_tick(std::uint64_t t) { tick_ = t; }

  bool field_occupied(Level level, std::uint32_t set, std::uint32_t way,
                      FieldKind field) const {
    return find(level, set, way, field) != nullptr;
  }

  // One injected upset. MCU shapes that straddle a block boundary attach
  // two single-block slices to the same group.
  std::uint32_t begin_group(std::uint8_t drawn_m, UpsetShape shape,
                            FieldKind field, Level level, TargetBucket bucket) {
    counters_->injections += 1;
    counters_->injected[std::size_t(field)][std::size_t(bucket)] += 1;
    if (drawn_m >= 1 && drawn_m <= CampaignCounters::kMaxM)
      counters_->injected_by_m[drawn_m] += 1;
    counters_->injected_by_shape[std::size_t(shape)] += 1;
    counters_->injected_by_level[std::size_t(level)] += 1;
    groups_.push_back(GroupFlags{});
    groups_.back().drawn_m = drawn_m;
    return static_cast<std::uint32_t>(groups_.size() - 1);
  }

  // Place one contiguous slice on one block's field. Returns false when the
  // field already carries a fault; the caller redraws.
  bool attach(CacheLevel& lvl, std::uint32_t set, std::uint32_t way,
              FieldKind field, const ErrorPattern& p, bool force_sdc,
              std::uint32_t group, const AddressMap& map) {
    if (field_occupied(lvl.level(), set, way, field)) return false;
    CacheLine& ln = lvl.at(set, way);
    GroupFlags& g = groups_.at(group);
    g.live_records += 1;

    FaultRecord rec;
    rec.level = lvl.level();
    rec.set = set;
    rec.way = way;
    rec.field = field;
    rec.force_sdc = force_sdc;
    rec.group = group;

    if (field == FieldKind::Data) {
      if (p.first_bit + p.flips > geom_.data_bits())
        throw std::out_of_range("data pattern exceeds the data field");
      ln.data_fault = FaultMeta{true, std::uint8_t(p.flips),
                                std::uint16_t(p.first_bit)};
      if (state_dirty(ln.state) && ln.owner == Ownership::UserData) {
        const unsigned k = sdc_word_count(ln.data_fault);
        if (k > 0)
          book_dl(DlKind::Word, std::uint64_t(k) * geom_.word_bytes,
                  FailureSource::SdcDfUd, g, FieldKind::Data);
      }
    } else {
      if (p.first_bit + p.flips > geom_.tag_bits)
        throw std::out_of_range("tag pattern exceeds the tag field");
      ln.tag_fault = FaultMeta{true, std::uint8_t(p.flips),
                               std::uint16_t(p.first_bit)};
      ln.overwritten_words = 0;
      const Verdict v = force_sdc
                            ? Verdict::Sdc
                            : classify_field(scheme_, p, geom_.tag_bits);
      const Ownership pre_owner = ln.owner;
      const bool pre_dirty = state_dirty(ln.state);
      if (state_present(ln.state) &&
          (v == Verdict::Due || v == Verdict::Sdc)) {
        // A detectable or silent tag error changes what address the stored
        // bits decode to; a correctable one stays transparent to lookup.
        apply_tag_flip(lvl, set, ln, p, map, geom_.tag_bits);
      }
      if (v == Verdict::Sdc && pre_dirty && pre_owner == Ownership::UserData) {
        // The dirty data is orphaned under the old address the moment the
        // tag silently changes.
        book_dl(DlKind::Line, geom_.line_bytes, FailureSource::SdcTfUd, g,
                FieldKind::Tag);
        if (ln.owner == Ownership::UserData)
          // And the write-back will land on the new address's user data.
          book_dl(DlKind::Line, geom_.line_bytes, FailureSource::SdcTfUd, g,
                  FieldKind::Tag);
      }
    }
    records_.push_back(rec);
    return true;
  }

  TrackerAction on_read(CacheLevel& lvl, std::uint32_t set, std::uint32_t way,
                        std::uint32_t word) {
    CacheLine& ln = lvl.at(set, way);
    if (FaultRecord* tr = find(lvl.level(), set, way, FieldKind::Tag)) {
      const Verdict v = tag_verdict(*tr, ln);
      if (v == Verdict::Dce) {
        record_outcome(OutcomeClass::Dce, *tr);
        clear_record(*tr, ln, MaskKind::Correct, true);
      } else if (v == Verdict::Due) {
        record_outcome(OutcomeClass::DueTf, *tr);
        return reboot(*tr, FailureSource::DueTf);
      } else {
        record_outcome(sdc_class(FieldKind::Tag, ln.owner), *tr);
        if (ln.owner == Ownership::UserData) {
          if ((ln.overwritten_words & (1ull << word)) == 0)
            book_dl(DlKind::WordPropagate, geom_.word_bytes,
                    FailureSource::SdcTfUd, groups_.at(tr->group),
                    FieldKind::Tag);
        } else if (ln.owner == Ownership::NonUserData) {
          const TrackerAction a = manifest(*tr, FieldKind::Tag);
          if (a != TrackerAction::None) return a;
        }
      }
    }
    if (FaultRecord* dr = find(lvl.level(), set, way, FieldKind::Data)) {
      const unsigned flips = word_flips(ln.data_fault, word);
      if (flips > 0) {
        const Verdict v = classify_span(scheme_, flips);
        if (v == Verdict::Dce) {
          record_outcome(OutcomeClass::Dce, *dr);
          strip_word(ln.data_fault, word);
          if (!ln.data_fault.present)
            clear_record(*dr, ln, MaskKind::Correct, false);
        } else if (v == Verdict::Due) {
          record_outcome(OutcomeClass::DueDf, *dr);
          if (state_dirty(ln.state)) return reboot(*dr, FailureSource::DueDf);
          clear_line_records(lvl.level(), set, way, ln, MaskKind::DetectValid);
          return TrackerAction::InvalidateRefetch;
        } else {
          record_outcome(sdc_class(FieldKind::Data, ln.owner), *dr);
          if (ln.owner == Ownership::UserData)
            book_dl(DlKind::WordPropagate, geom_.word_bytes,
                    FailureSource::SdcDfUd, groups_.at(dr->group),
                    FieldKind::Data);
          else if (ln.owner == Ownership::NonUserData)
            return manifest(*dr, FieldKind::Data);
        }
      }
    }
    return TrackerAction::None;
  }

  TrackerAction on_write(CacheLevel& lvl, std::uint32_t set, std::uint32_t way,
                         std::uint32_t word) {
    CacheLine& ln = lvl.at(set, way);
    if (FaultRecord* tr = find(lvl.level(), set, way, FieldKind::Tag)) {
      const Verdict v = tag_verdict(*tr, ln);
      if (v == Verdict::Dce) {
        record_outcome(OutcomeClass::Dce, *tr);
        clear_record(*tr, ln, MaskKind::Correct, true);
      } else if (v == Verdict::Due) {
        // The controller cannot trust the line's identity or dirty status,
        // so a write cannot be allowed to proceed.
        record_outcome(OutcomeClass::DueTf, *tr);
        return reboot(*tr, FailureSource::DueTf);
      } else {
        record_outcome(sdc_class(FieldKind::Tag, ln.owner), *tr);
        ln.overwritten_words |= 1ull << word;
        if (std::popcount(ln.overwritten_words) ==
            static_cast<int>(geom_.words_per_line()))
          clear_record(*tr, ln, MaskKind::Write, true);
      }
    }
    if (FaultRecord* dr = find(lvl.level(), set, way, FieldKind::Data)) {
      if (word_flips(ln.data_fault, word) > 0) {
        strip_word(ln.data_fault, word);
        if (!ln.data_fault.present)
          clear_record(*dr, ln, MaskKind::Write, false);
      }
    }
    return TrackerAction::None;
  }

  TrackerAction on_update(CacheLevel& lvl, std::uint32_t set,
                          std::uint32_t way) {
    CacheLine& ln = lvl.at(set, way);
    if (FaultRecord* tr = find(lvl.level(), set, way, FieldKind::Tag)) {
      const Verdict v = tag_verdict(*tr, ln);
      if (v == Verdict::Dce) {
        record_outcome(OutcomeClass::Dce, *tr);
        clear_record(*tr, ln, MaskKind::Correct, true);
      } else if (v == Verdict::Due) {
        record_outcome(OutcomeClass::DueTf, *tr);
        return reboot(*tr, FailureSource::DueTf);
      } else {
        // The whole line now legitimately belongs to the remapped address.
        record_outcome(sdc_class(FieldKind::Tag, ln.owner), *tr);
        clear_record(*tr, ln, MaskKind::Update, true);
      }
    }
    if (FaultRecord* dr = find(lvl.level(), set, way, FieldKind::Data))
      clear_record(*dr, ln, MaskKind::Update, false);
    return TrackerAction::None;
  }

  // The line is leaving this level (replacement or back-invalidation).
  TrackerAction on_evict(CacheLevel& lvl, std::uint32_t set,
                         std::uint32_t way) {
    CacheLine& ln = lvl.at(set, way);
    if (!state_dirty(ln.state)) {
      clear_line_records(lvl.level(), set, way, ln, MaskKind::Insert);
      return TrackerAction::None;
    }
    FaultRecord* tr = find(lvl.level(), set, way, FieldKind::Tag);
    FaultRecord* dr = find(lvl.level(), set, way, FieldKind::Data);
    if (tr && tag_verdict(*tr, ln) == Verdict::Due) {
      record_outcome(OutcomeClass::DueTf, *tr);
      return reboot(*tr, FailureSource::DueTf);
    }
    if (dr && any_word_verdict(ln.data_fault) == Verdict::Due) {
      record_outcome(OutcomeClass::DueDf, *dr);
      return reboot(*dr, FailureSource::DueDf);
    }
    if (tr && tag_verdict(*tr, ln) == Verdict::Dce) {
      record_outcome(OutcomeClass::Dce, *tr);
      clear_record(*tr, ln, MaskKind::Correct, true);
      tr = nullptr;
    }
    if (dr) {
      // Correct what the code can correct during the write-back, then any
      // surviving silent corruption rides down a level.
      unsigned sdc_words = 0;
      for (std::uint32_t w = 0; w < geom_.words_per_line(); ++w) {
        const unsigned flips = word_flips(ln.data_fault, w);
        if (flips == 0) continue;
        const Verdict v = classify_span(scheme_, flips);
        if (v == Verdict::Dce) {
          record_outcome(OutcomeClass::Dce, *dr);
          strip_word(ln.data_fault, w);
        } else if (v == Verdict::Sdc) {
          ++sdc_words;
        }
      }
      if (sdc_words > 0) {
        record_outcome(sdc_class(FieldKind::Data, ln.owner), *dr);
        if (ln.owner == Ownership::UserData)
          book_dl(DlKind::WordPropagateLower,
                  std::uint64_t(sdc_words) * geom_.word_bytes,
                  FailureSource::SdcDfUd, groups_.at(dr->group),
                  FieldKind::Data);
        // Non-user corruption leaves tracked scope with the write-back.
        drop_record(*dr, ln, false);
      } else if (!ln.data_fault.present) {
        if (dr->live) clear_record(*dr, ln, MaskKind::Correct, false);
      }
    }
    if (tr) {
      record_outcome(sdc_class(FieldKind::Tag, ln.owner), *tr);
      if (ln.owner == Ownership::UserData) {
        const std::uint64_t bytes =
            dl_magnitude(geom_.line_bytes, std::popcount(ln.overwritten_words),
                         geom_.word_bytes);
        if (bytes > 0)
          book_dl(DlKind::LinePropagateLower, bytes, FailureSource::SdcTfUd,
                  groups_.at(tr->group), FieldKind::Tag);
      }
      drop_record(*tr, ln, true);
    }
    return TrackerAction::None;
  }

  // A reboot wipes every cache; faults that were not themselves the cause
  // mask as a side effect.
  void on_reboot_flush() {
    for (FaultRecord& r : records_) {
      if (!r.live) continue;
      GroupFlags& g = groups_.at(r.group);
      r.live = false;
      if (g.live_records > 0) g.live_records -= 1;
      if (rebooting_group_ != r.group) mask_group(g, MaskKind::Reboot);
    }
    rebooting_group_ = UINT32_MAX;
  }

  // End-of-run disposition sweep.
  void finalize() {
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
      const GroupFlags& g = groups_[gi];
      if (!g.outcome_done && !g.mask_done && !g.du_done && !g.dl_done &&
          !g.benign)
        counters_->untouched += 1;
    }
  }

  const std::vector<FaultRecord>& records() const { return records_; }

 private:
  struct GroupFlags {
    std::uint8_t drawn_m = 1;
    bool outcome_done = false;
    bool du_done = false;
    bool dl_done = false;
    bool mask_done = false;
    bool benign = false;
    bool manifest_drawn = false;
    std::uint32_t live_records = 0;
  };

  FaultRecord* find(Level level, std::uint32_t set, std::uint32_t way,
                    FieldKind field) {
    for (FaultRecord& r : records_)
      if (r.live && r.level == level && r.set == set && r.way == way &&
          r.field == field)
        return &r;
    return nullptr;
  }
  const FaultRecord* find(Level level, std::uint32_t set, std::uint32_t way,
                          FieldKind field) const {
    return const_cast<ConsequenceTracker*>(this)->find(level, set, way, field);
  }

  Verdict tag_verdict(const FaultRecord& r, const CacheLine& ln) const {
    if (r.force_sdc) return Verdict::Sdc;
    return classify_span(scheme_, ln.tag_fault.flips);
  }

  unsigned word_flips(const FaultMeta& m, std::uint32_t word) const {
    if (!m.present) return 0;
    const unsigned wb = geom_.word_bits();
    const unsigned lo = m.first_bit, hi = m.first_bit + m.flips;
    const unsigned wlo = word * wb, whi = (word + 1) * wb;
    if (hi <= wlo || lo >= whi) return 0;
    return std::min(hi, whi) - std::max(lo, wlo);
  }

  unsigned sdc_word_count(const FaultMeta& m) const {
    unsigned k = 0;
    for (std::uint32_t w = 0; w < geom_.words_per_line(); ++w) {
      const unsigned flips = word_flips(m, w);
      if (flips > 0 && classify_span(scheme_, flips) == Verdict::Sdc) ++k;
    }
    return k;
  }

  Verdict any_word_verdict(const FaultMeta& m) const {
    Verdict v = Verdict::NoError;
    for (std::uint32_t w = 0; w < geom_.words_per_line(); ++w) {
      const unsigned flips = word_flips(m, w);
      if (flips > 0) v = combine_verdicts(v, classify_span(scheme_, flips));
    }
    return v;
  }

  // Remove the slice of the pattern falling in `word`; the remainder stays
  // contiguous because a block pattern spans at most two adjacent words.
  void strip_word(FaultMeta& m, std::uint32_t word) const {
    const unsigned wb = geom_.word_bits();
    const unsigned lo = m.first_bit, hi = m.first_bit + m.flips;
    const unsigned wlo = word * wb, whi = (word + 1) * wb;
    if (lo >= wlo && hi <= whi) {
      m = FaultMeta{};
    } else if (lo < wlo) {
      m.flips = std::uint8_t(wlo - lo);
    } else {
      m.first_bit = std::uint16_t(whi);
      m.flips = std::uint8_t(hi - whi);
    }
  }

  static OutcomeClass sdc_class(FieldKind f, Ownership o) {
    if (f == FieldKind::Tag)
      return o == Ownership::UserData ? OutcomeClass::SdcTfUd
                                      : OutcomeClass::SdcTfNud;
    return o == Ownership::UserData ? OutcomeClass::SdcDfUd
                                    : OutcomeClass::SdcDfNud;
  }

  void record_outcome(OutcomeClass c, FaultRecord& r) {
    GroupFlags& g = groups_.at(r.group);
    if (g.outcome_done) return;
    g.outcome_done = true;
    counters_->outcomes[std::size_t(c)] += 1;
    emit("outcome", outcome_name(c), 0);
  }

  void book_dl(DlKind kind, std::uint64_t bytes, FailureSource src,
               GroupFlags& g, FieldKind field) {
    if (src == FailureSource::DueTf || src == FailureSource::DueDf)
      counters_->dl_events_from_due += 1;  // invariant: stays zero
    counters_->dl_kind_count[std::size_t(kind)] += 1;
    counters_->dl_kind_bytes[std::size_t(kind)] += bytes;
    counters_->dl_bytes_total += bytes;
    counters_->dl_by_source[std::size_t(src)] += 1;
    if (!g.dl_done) {
      g.dl_done = true;
      counters_->dl_by_field[std::size_t(field)] += 1;
      if (g.drawn_m <= CampaignCounters::kMaxM)
        counters_->dl_by_m[g.drawn_m] += 1;
    }
    emit("dl", dl_name(kind), bytes);
  }

  TrackerAction reboot(FaultRecord& r, FailureSource src) {
    GroupFlags& g = groups_.at(r.group);
    if (!g.du_done) {
      g.du_done = true;
      counters_->du_by_field[std::size_t(r.field)] += 1;
      counters_->du_by_source[std::size_t(src)] += 1;
      if (g.drawn_m <= CampaignCounters::kMaxM)
        counters_->du_by_m[g.drawn_m] += 1;
    }
    counters_->reboots += 1;
    rebooting_group_ = r.group;
    emit("du", source_name(src), 0);
    return TrackerAction::Reboot;
  }

  TrackerAction manifest(FaultRecord& r, FieldKind field) {
    GroupFlags& g = groups_.at(r.group);
    if (g.manifest_drawn) return TrackerAction::None;
    g.manifest_drawn = true;
    const FailureSource src = field == FieldKind::Tag
                                  ? FailureSource::SdcTfNud
                                  : FailureSource::SdcDfNud;
    if (rng_.bernoulli(params_.p_not_manifest)) {
      g.benign = true;
      counters_->benign_sdc += 1;
      emit("outcome", "benign", 0);
      return TrackerAction::None;
    }
    if (rng_.bernoulli(params_.p_os_dl)) {
      // Lost user data through a misbehaving consumer of the corruption;
      // booked at the smallest quantum the accounting has.
      book_dl(DlKind::Word, geom_.word_bytes, src, g, field);
      return TrackerAction::None;
    }
    return reboot(r, src);
  }

  // Fault neutralized with a masking event (counted unless the group
  // already failed terminally).
  void clear_record(FaultRecord& r, CacheLine& ln, MaskKind kind,
                    bool tag_side) {
    drop_record(r, ln, tag_side);
    GroupFlags& g = groups_.at(r.group);
    if (g.live_records == 0) mask_group(g, kind);
  }

  // Fault leaves tracked scope without a masking event.
  void drop_record(FaultRecord& r, CacheLine& ln, bool tag_side) {
    if (!r.live) return;
    r.live = false;
    if (tag_side)
      ln.tag_fault = FaultMeta{};
    else
      ln.data_fault = FaultMeta{};
    GroupFlags& g = groups_.at(r.group);
    if (g.live_records > 0) g.live_records -= 1;
  }

  void clear_line_records(Level level, std::uint32_t set, std::uint32_t way,
                          CacheLine& ln, MaskKind kind) {
    if (FaultRecord* tr = find(level, set, way, FieldKind::Tag))
      clear_record(*tr, ln, kind, true);
    if (FaultRecord* dr = find(level, set, way, FieldKind::Data))
      clear_record(*dr, ln, kind, false);
  }

  void mask_group(GroupFlags& g, MaskKind kind) {
    if (g.du_done || g.dl_done || g.mask_done) return;
    g.mask_done = true;
    counters_->masks[std::size_t(kind)] += 1;
    emit("mask", mask_name(kind), 0);
  }

  void emit(const char* kind, const char* detail, std::uint64_t bytes) {
    if (sink_) sink_(TrackedEvent{tick_, kind, detail, bytes});
  }

  CacheGeometry geom_;
  ProtectionScheme scheme_;
  ManifestationParams params_;
  CampaignCounters* counters_;
  Rng rng_;
  std::vector<FaultRecord> records_;
  std::vector<GroupFlags> groups_;
  std::uint32_t rebooting_group_ = UINT32_MAX;
  std::uint64_t tick_ = 0;
  std::function<void(const TrackedEvent&)> sink_;
};

}  // namespace ssvf
