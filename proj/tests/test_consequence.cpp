// The controller decision table, scenario by scenario: each access kind
// against each check verdict, driven through the real access engine.

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>

#include "ssvf/consequence.hpp"
#include "ssvf/engine.hpp"
#include "ssvf/metrics.hpp"

using namespace ssvf;

namespace {

constexpr std::uint64_t kL1SetStride = 64 * 256;    // same L1 set, next tag
constexpr std::uint64_t kL2SetStride = 64 * 4096;   // same L2 set, next tag

std::uint64_t n_outcomes(const CampaignCounters& c, OutcomeClass oc) {
  return c.outcomes[std::size_t(oc)];
}
std::uint64_t n_masks(const CampaignCounters& c, MaskKind m) {
  return c.masks[std::size_t(m)];
}
std::uint64_t dl_bytes(const CampaignCounters& c, DlKind k) {
  return c.dl_kind_bytes[std::size_t(k)];
}
std::uint64_t dl_count(const CampaignCounters& c, DlKind k) {
  return c.dl_kind_count[std::size_t(k)];
}

std::uint64_t mask_total(const CampaignCounters& c) {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < std::size_t(MaskKind::Count_); ++i)
    t += c.masks[i];
  return t;
}
std::uint64_t outcome_total(const CampaignCounters& c) {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < std::size_t(OutcomeClass::Count_); ++i)
    t += c.outcomes[i];
  return t;
}

struct Rig {
  CacheGeometry geom{};
  AddressMap map = AddressMap::from_fractions(16ull << 20, 0.0625, 0.25, 64);
  CampaignCounters counters{};
  AccessEngine engine;
  ConsequenceTracker tracker;
  std::uint64_t tick = 0;

  explicit Rig(SchemeKind k, ManifestationParams mp = {},
               EngineConfig ecfg = {})
      : engine(geom, map, ecfg),
        tracker(geom, ProtectionScheme::make(k), mp, counters,
                Rng::derive(1, 0x6d66u)) {
    engine.set_tracker(&tracker);
  }

  // Returns true when the access rebooted the controller (and performs the
  // flush the campaign driver would).
  bool drive(std::uint64_t addr, AccessKind kind) {
    const bool r = engine.access({addr, kind, AccessOrigin::UserPayload},
                                 tick++);
    if (r) {
      tracker.on_reboot_flush();
      engine.reset();
    }
    return r;
  }
  bool read(std::uint64_t addr) { return drive(addr, AccessKind::ReadWord); }
  bool write(std::uint64_t addr) { return drive(addr, AccessKind::WriteWord); }
  bool update(std::uint64_t addr) {
    return drive(addr, AccessKind::UpdateLine);
  }

  // A read installs the line clean in both levels; a write dirties L1.
  void fill_clean(std::uint64_t addr) { REQUIRE_FALSE(read(addr)); }
  void make_dirty(std::uint64_t addr) { REQUIRE_FALSE(write(addr)); }

  CacheLine& l1_line(std::uint64_t addr) {
    const std::uint32_t set = engine.l1().set_of(addr);
    const int way = engine.l1().find(set, engine.l1().tag_of(addr));
    REQUIRE(way >= 0);
    return engine.l1().at(set, std::uint32_t(way));
  }

  // Inject one contiguous run on the L1 line currently caching `addr`.
  std::uint32_t inject_l1(std::uint64_t addr, FieldKind field, unsigned flips,
                          unsigned first) {
    const std::uint32_t set = engine.l1().set_of(addr);
    const int way = engine.l1().find(set, engine.l1().tag_of(addr));
    REQUIRE(way >= 0);
    const CacheLine& ln = engine.l1().at(set, std::uint32_t(way));
    const TargetBucket bucket =
        ln.owner == Ownership::UserData ? TargetBucket::User
                                        : TargetBucket::NonUser;
    const auto shape =
        flips == 1 ? UpsetShape::Single : UpsetShape::MultiBit;
    const std::uint32_t g = tracker.begin_group(std::uint8_t(flips), shape,
                                                field, Level::L1, bucket);
    REQUIRE(tracker.attach(engine.l1(), set, std::uint32_t(way), field,
                           {flips, first}, false, g, map));
    return g;
  }

  std::uint32_t inject_l2(std::uint64_t addr, FieldKind field, unsigned flips,
                          unsigned first) {
    const std::uint32_t set = engine.l2().set_of(addr);
    const int way = engine.l2().find(set, engine.l2().tag_of(addr));
    REQUIRE(way >= 0);
    const auto shape =
        flips == 1 ? UpsetShape::Single : UpsetShape::MultiBit;
    const std::uint32_t g = tracker.begin_group(std::uint8_t(flips), shape,
                                                field, Level::L2,
                                                TargetBucket::User);
    REQUIRE(tracker.attach(engine.l2(), set, std::uint32_t(way), field,
                           {flips, first}, false, g, map));
    return g;
  }
};

}  // namespace

TEST_CASE("stale bytes lost at write-back shrink with rewritten words") {
  for (std::uint64_t k = 0; k <= 8; ++k)
    REQUIRE(dl_magnitude(64, k, 8) == 64 - 8 * k);
  REQUIRE_THROWS_AS(dl_magnitude(64, 9, 8), std::invalid_argument);
}

TEST_CASE("manifestation probabilities validate") {
  REQUIRE_NOTHROW(ManifestationParams{}.validate());
  REQUIRE_THROWS_AS((ManifestationParams{1.5, 0.0}.validate()),
                    std::invalid_argument);
  REQUIRE_THROWS_AS((ManifestationParams{0.5, -0.1}.validate()),
                    std::invalid_argument);
}

TEST_CASE("injection bookkeeping counts each group once") {
  Rig rig(SchemeKind::Secded);
  rig.fill_clean(0);
  rig.inject_l1(0, FieldKind::Data, 2, 100);
  REQUIRE(rig.counters.injections == 1);
  REQUIRE(rig.counters.injected[std::size_t(FieldKind::Data)]
                               [std::size_t(TargetBucket::User)] == 1);
  REQUIRE(rig.counters.injected_by_m[2] == 1);
  REQUIRE(rig.counters.injected_by_shape[std::size_t(UpsetShape::MultiBit)] ==
          1);
  REQUIRE(rig.counters.injected_by_level[std::size_t(Level::L1)] == 1);
}

TEST_CASE("a field holds at most one fault; the other field is free") {
  Rig rig(SchemeKind::Secded);
  rig.fill_clean(0);
  rig.inject_l1(0, FieldKind::Data, 1, 5);
  const std::uint32_t set = rig.engine.l1().set_of(0);
  const std::uint32_t way =
      std::uint32_t(rig.engine.l1().find(set, rig.engine.l1().tag_of(0)));
  REQUIRE(rig.tracker.field_occupied(Level::L1, set, way, FieldKind::Data));
  const std::uint32_t g = rig.tracker.begin_group(
      1, UpsetShape::Single, FieldKind::Data, Level::L1, TargetBucket::User);
  REQUIRE_FALSE(rig.tracker.attach(rig.engine.l1(), set, way, FieldKind::Data,
                                   {1, 9}, false, g, rig.map));
  REQUIRE_FALSE(
      rig.tracker.field_occupied(Level::L1, set, way, FieldKind::Tag));
}

TEST_CASE("correctable data faults strip on read") {
  Rig rig(SchemeKind::Secded);
  rig.fill_clean(0);
  rig.inject_l1(0, FieldKind::Data, 1, 3 * 64 + 5);
  REQUIRE_FALSE(rig.read(3 * 8));  // the faulted word
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::Dce) == 1);
  REQUIRE(n_masks(rig.counters, MaskKind::Correct) == 1);
  REQUIRE_FALSE(rig.l1_line(0).data_fault.present);
  // Nothing further on a later read of the same word.
  REQUIRE_FALSE(rig.read(3 * 8));
  REQUIRE(outcome_total(rig.counters) == 1);
  rig.tracker.finalize();
  REQUIRE(rig.counters.untouched == 0);
  REQUIRE(rig.counters.dl_bytes_total == 0);
  REQUIRE(rig.counters.reboots == 0);
}

TEST_CASE("a straddling correctable run strips word by word") {
  Rig rig(SchemeKind::Secded);
  rig.fill_clean(0);
  // Bits 127 and 128: one flip at the top of word 1, one at the bottom of
  // word 2, each correctable on its own.
  rig.inject_l1(0, FieldKind::Data, 2, 127);
  REQUIRE_FALSE(rig.read(1 * 8));
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::Dce) == 1);
  REQUIRE(rig.l1_line(0).data_fault.present);  // word 2's half remains
  REQUIRE(rig.l1_line(0).data_fault.first_bit == 128);
  REQUIRE(rig.l1_line(0).data_fault.flips == 1);
  REQUIRE(mask_total(rig.counters) == 0);
  REQUIRE_FALSE(rig.read(2 * 8));
  REQUIRE_FALSE(rig.l1_line(0).data_fault.present);
  REQUIRE(n_masks(rig.counters, MaskKind::Correct) == 1);
  REQUIRE(outcome_total(rig.counters) == 1);  // outcome recorded once
}

TEST_CASE("detected data faults on a clean line refetch in place") {
  Rig rig(SchemeKind::Parity);
  rig.fill_clean(64);
  rig.inject_l1(64, FieldKind::Data, 1, 10);
  REQUIRE_FALSE(rig.read(64));  // word 0 of the line
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::DueDf) == 1);
  REQUIRE(n_masks(rig.counters, MaskKind::DetectValid) == 1);
  REQUIRE(rig.counters.reboots == 0);
  // The line is back, clean and fault-free.
  CacheLine& ln = rig.l1_line(64);
  REQUIRE(state_present(ln.state));
  REQUIRE_FALSE(ln.data_fault.present);
  REQUIRE(rig.counters.du_total() == 0);
}

TEST_CASE("detected data faults on a dirty line reboot") {
  Rig rig(SchemeKind::Parity);
  rig.make_dirty(64);
  rig.inject_l1(64, FieldKind::Data, 1, 10);
  REQUIRE(rig.read(64));
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::DueDf) == 1);
  REQUIRE(rig.counters.reboots == 1);
  REQUIRE(rig.counters.du_by_field[std::size_t(FieldKind::Data)] == 1);
  REQUIRE(rig.counters.du_by_source[std::size_t(FailureSource::DueDf)] == 1);
  REQUIRE(rig.counters.du_by_m[1] == 1);
  REQUIRE(mask_total(rig.counters) == 0);
  REQUIRE(rig.counters.dl_bytes_total == 0);
  // The flush emptied both levels.
  REQUIRE(rig.engine.l1().user_line_fraction() == 0.0);
  REQUIRE(rig.engine.l2().user_line_fraction() == 0.0);
}

TEST_CASE("silent corruption on a dirty user line bleeds words per read") {
  Rig rig(SchemeKind::Parity);
  rig.make_dirty(0);
  // Two flips inside word 5: even parity, silent.
  rig.inject_l1(0, FieldKind::Data, 2, 5 * 64 + 10);
  // Landing on the only copy books the word immediately.
  REQUIRE(dl_bytes(rig.counters, DlKind::Word) == 8);
  REQUIRE(rig.counters.dl_by_field[std::size_t(FieldKind::Data)] == 1);
  REQUIRE_FALSE(rig.read(5 * 8));
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::SdcDfUd) == 1);
  REQUIRE(dl_bytes(rig.counters, DlKind::WordPropagate) == 8);
  REQUIRE_FALSE(rig.read(5 * 8));  // every stale read loses it again
  REQUIRE(dl_bytes(rig.counters, DlKind::WordPropagate) == 16);
  REQUIRE(rig.counters.dl_bytes_total == 24);
  REQUIRE(rig.counters.dl_by_field[std::size_t(FieldKind::Data)] == 1);
  REQUIRE(rig.counters.dl_by_m[2] == 1);
  REQUIRE(rig.counters.dl_by_source[std::size_t(FailureSource::SdcDfUd)] == 3);
  REQUIRE(rig.counters.dl_events_from_due == 0);
}

TEST_CASE("silent corruption on a clean user line books only when read") {
  Rig rig(SchemeKind::Parity);
  rig.fill_clean(0);
  rig.inject_l1(0, FieldKind::Data, 2, 5 * 64 + 10);
  REQUIRE(rig.counters.dl_bytes_total == 0);  // memory still has the truth
  REQUIRE_FALSE(rig.read(5 * 8));
  REQUIRE(dl_bytes(rig.counters, DlKind::WordPropagate) == 8);
  REQUIRE(rig.counters.dl_bytes_total == 8);
}

TEST_CASE("non-user silent corruption draws its manifestation once") {
  const std::uint64_t os_addr = (1ull << 20) + 3 * 64;  // OS region line

  SECTION("benign when it does not manifest") {
    Rig rig(SchemeKind::None, ManifestationParams{1.0, 0.0});
    rig.fill_clean(os_addr);
    rig.inject_l1(os_addr, FieldKind::Data, 1, 7);
    REQUIRE_FALSE(rig.read(os_addr));
    REQUIRE(n_outcomes(rig.counters, OutcomeClass::SdcDfNud) == 1);
    REQUIRE(rig.counters.benign_sdc == 1);
    REQUIRE_FALSE(rig.read(os_addr));  // the draw is sticky
    REQUIRE(rig.counters.benign_sdc == 1);
    REQUIRE(rig.counters.du_total() == 0);
    REQUIRE(rig.counters.dl_bytes_total == 0);
    rig.tracker.finalize();
    REQUIRE(rig.counters.untouched == 0);  // benign is a real disposition
  }

  SECTION("a manifesting error can corrupt user data it was serving") {
    Rig rig(SchemeKind::None, ManifestationParams{0.0, 1.0});
    rig.fill_clean(os_addr);
    rig.inject_l1(os_addr, FieldKind::Data, 1, 7);
    REQUIRE_FALSE(rig.read(os_addr));
    REQUIRE(dl_bytes(rig.counters, DlKind::Word) == 8);
    REQUIRE(rig.counters.dl_by_source[std::size_t(FailureSource::SdcDfNud)] ==
            1);
    REQUIRE(rig.counters.reboots == 0);
    REQUIRE_FALSE(rig.read(os_addr));  // sticky: no second loss
    REQUIRE(rig.counters.dl_bytes_total == 8);
  }

  SECTION("a manifesting error otherwise crashes the controller") {
    Rig rig(SchemeKind::None, ManifestationParams{0.0, 0.0});
    rig.fill_clean(os_addr);
    rig.inject_l1(os_addr, FieldKind::Data, 1, 7);
    REQUIRE(rig.read(os_addr));
    REQUIRE(rig.counters.reboots == 1);
    REQUIRE(rig.counters.du_by_source[std::size_t(FailureSource::SdcDfNud)] ==
            1);
    REQUIRE(rig.counters.du_by_field[std::size_t(FieldKind::Data)] == 1);
  }
}

TEST_CASE("correctable tag faults clear without remapping") {
  Rig rig(SchemeKind::Secded);
  rig.fill_clean(64);
  const std::uint32_t old_tag = rig.l1_line(64).tag;
  rig.inject_l1(64, FieldKind::Tag, 1, 4);
  REQUIRE(rig.l1_line(64).tag == old_tag);  // correctable, not applied
  REQUIRE_FALSE(rig.read(64));
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::Dce) == 1);
  REQUIRE(n_masks(rig.counters, MaskKind::Correct) == 1);
  REQUIRE_FALSE(rig.l1_line(64).tag_fault.present);
}

TEST_CASE("detected tag faults remap the line and reboot on its next touch") {
  Rig rig(SchemeKind::Secded);
  rig.fill_clean(0);
  rig.inject_l1(0, FieldKind::Tag, 2, 0);
  // The stored tag now decodes to a different address; the original misses.
  const std::uint64_t remapped = 3ull << 14;
  REQUIRE(rig.engine.l1().find(rig.engine.l1().set_of(0),
                               rig.engine.l1().tag_of(0)) == -1);
  REQUIRE(rig.read(remapped));
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::DueTf) == 1);
  REQUIRE(rig.counters.du_by_source[std::size_t(FailureSource::DueTf)] == 1);
  REQUIRE(rig.counters.du_by_field[std::size_t(FieldKind::Tag)] == 1);
}

TEST_CASE("silent tag corruption on a dirty user line orphans it at once") {
  Rig rig(SchemeKind::Parity);
  rig.make_dirty(0);
  // Even parity over the tag: silent. New decoded address 0x0c000 is still
  // user space, so the write-back will also trample user data there.
  rig.inject_l1(0, FieldKind::Tag, 2, 0);
  REQUIRE(dl_count(rig.counters, DlKind::Line) == 2);
  REQUIRE(dl_bytes(rig.counters, DlKind::Line) == 128);
  REQUIRE(rig.counters.dl_by_field[std::size_t(FieldKind::Tag)] == 1);
  REQUIRE(rig.counters.dl_by_source[std::size_t(FailureSource::SdcTfUd)] == 2);

  const std::uint64_t remapped = 3ull << 14;
  // Reads under the new address serve stale words.
  REQUIRE_FALSE(rig.read(remapped));
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::SdcTfUd) == 1);
  REQUIRE(dl_bytes(rig.counters, DlKind::WordPropagate) == 8);

  // A rewritten word stops bleeding.
  REQUIRE_FALSE(rig.write(remapped));
  REQUIRE_FALSE(rig.read(remapped));
  REQUIRE(dl_bytes(rig.counters, DlKind::WordPropagate) == 8);

  // Rewriting every word retires the fault; no mask credit after real loss.
  for (std::uint32_t w = 1; w < 8; ++w)
    REQUIRE_FALSE(rig.write(remapped + 8 * w));
  REQUIRE_FALSE(rig.l1_line(remapped).tag_fault.present);
  REQUIRE(mask_total(rig.counters) == 0);
  REQUIRE(rig.counters.dl_bytes_total == 128 + 8);
}

TEST_CASE("silent tag corruption landing outside user space books one line") {
  Rig rig(SchemeKind::Parity);
  rig.make_dirty(0);
  // Tag bit 17 decodes to an address beyond every mapped region.
  rig.inject_l1(0, FieldKind::Tag, 2, 16);
  REQUIRE(dl_count(rig.counters, DlKind::Line) == 1);
  REQUIRE(dl_bytes(rig.counters, DlKind::Line) == 64);
  const std::uint64_t remapped = 3ull << 30;
  REQUIRE_FALSE(rig.read(remapped));
  // Invalid-space lines neither bleed user words nor manifest.
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::SdcTfNud) == 1);
  REQUIRE(rig.counters.dl_bytes_total == 64);
  REQUIRE(rig.counters.benign_sdc == 0);
}

TEST_CASE("a full-line update legitimizes a silently remapped clean line") {
  Rig rig(SchemeKind::Parity);
  rig.fill_clean(0);
  rig.inject_l1(0, FieldKind::Tag, 2, 0);
  REQUIRE(rig.counters.dl_bytes_total == 0);  // clean: nothing orphaned
  const std::uint64_t remapped = 3ull << 14;
  REQUIRE_FALSE(rig.update(remapped));
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::SdcTfUd) == 1);
  REQUIRE(n_masks(rig.counters, MaskKind::Update) == 1);
  CacheLine& ln = rig.l1_line(remapped);
  REQUIRE_FALSE(ln.tag_fault.present);
  REQUIRE(state_dirty(ln.state));
  rig.tracker.finalize();
  REQUIRE(rig.counters.untouched == 0);
  REQUIRE(rig.counters.dl_bytes_total == 0);
}

TEST_CASE("writes overwrite data faults without consulting the code") {
  SECTION("a detectable pattern is simply replaced") {
    Rig rig(SchemeKind::Parity);
    rig.fill_clean(0);
    rig.inject_l1(0, FieldKind::Data, 1, 2 * 64 + 7);
    REQUIRE_FALSE(rig.write(2 * 8));
    REQUIRE(outcome_total(rig.counters) == 0);
    REQUIRE(n_masks(rig.counters, MaskKind::Write) == 1);
    REQUIRE_FALSE(rig.l1_line(0).data_fault.present);
  }
  SECTION("a straddling pattern is consumed one word at a time") {
    Rig rig(SchemeKind::Parity);
    rig.fill_clean(0);
    // Bits 190..192: two flips atop word 2, one at the base of word 3.
    rig.inject_l1(0, FieldKind::Data, 3, 190);
    REQUIRE_FALSE(rig.write(2 * 8));
    CacheLine& ln = rig.l1_line(0);
    REQUIRE(ln.data_fault.present);
    REQUIRE(ln.data_fault.first_bit == 192);
    REQUIRE(ln.data_fault.flips == 1);
    REQUIRE(mask_total(rig.counters) == 0);
    // The leftover single flip is an odd parity word again: the next read
    // detects it, and the line is now dirty, so the controller reboots.
    REQUIRE(rig.read(3 * 8));
    REQUIRE(n_outcomes(rig.counters, OutcomeClass::DueDf) == 1);
  }
}

TEST_CASE("updates mask data faults wholesale") {
  Rig rig(SchemeKind::Parity);
  rig.fill_clean(0);
  rig.inject_l1(0, FieldKind::Data, 2, 100);
  REQUIRE_FALSE(rig.update(0));
  REQUIRE(outcome_total(rig.counters) == 0);
  REQUIRE(n_masks(rig.counters, MaskKind::Update) == 1);
  REQUIRE_FALSE(rig.l1_line(0).data_fault.present);
}

TEST_CASE("evicting a clean faulty line masks it by replacement") {
  Rig rig(SchemeKind::Parity);
  rig.fill_clean(0);
  rig.inject_l1(0, FieldKind::Data, 2, 9);
  // Eight conflicting lines force the victim choice onto the faulty line.
  for (std::uint64_t k = 1; k <= 8; ++k)
    REQUIRE_FALSE(rig.read(k * kL1SetStride));
  REQUIRE(rig.engine.l1().find(rig.engine.l1().set_of(0),
                               rig.engine.l1().tag_of(0)) == -1);
  REQUIRE(n_masks(rig.counters, MaskKind::Insert) == 1);
  REQUIRE(outcome_total(rig.counters) == 0);
  REQUIRE(rig.counters.dl_bytes_total == 0);
}

TEST_CASE("dirty eviction write-back consults both fields") {
  SECTION("a detectable data pattern reboots") {
    Rig rig(SchemeKind::Parity);
    rig.make_dirty(0);
    rig.inject_l1(0, FieldKind::Data, 1, 9);
    const std::uint32_t set = rig.engine.l1().set_of(0);
    REQUIRE(rig.tracker.on_evict(rig.engine.l1(), set, 0) ==
            TrackerAction::Reboot);
    REQUIRE(n_outcomes(rig.counters, OutcomeClass::DueDf) == 1);
    REQUIRE(rig.counters.du_by_source[std::size_t(FailureSource::DueDf)] == 1);
  }
  SECTION("correctable faults are corrected on the way down") {
    Rig rig(SchemeKind::Secded);
    rig.make_dirty(0);
    rig.inject_l1(0, FieldKind::Data, 1, 9);
    const std::uint32_t set = rig.engine.l1().set_of(0);
    REQUIRE(rig.tracker.on_evict(rig.engine.l1(), set, 0) ==
            TrackerAction::None);
    REQUIRE(n_outcomes(rig.counters, OutcomeClass::Dce) == 1);
    REQUIRE(n_masks(rig.counters, MaskKind::Correct) == 1);
    REQUIRE(rig.counters.dl_bytes_total == 0);
  }
  SECTION("surviving silent user corruption rides down a level") {
    Rig rig(SchemeKind::Parity);
    rig.make_dirty(0);
    rig.inject_l1(0, FieldKind::Data, 2, 5 * 64 + 3);  // books 8 B at once
    const std::uint32_t set = rig.engine.l1().set_of(0);
    REQUIRE(rig.tracker.on_evict(rig.engine.l1(), set, 0) ==
            TrackerAction::None);
    REQUIRE(n_outcomes(rig.counters, OutcomeClass::SdcDfUd) == 1);
    REQUIRE(dl_bytes(rig.counters, DlKind::WordPropagateLower) == 8);
    REQUIRE(rig.counters.dl_bytes_total == 16);
    REQUIRE(mask_total(rig.counters) == 0);
    // The record left tracked scope with the write-back.
    REQUIRE_FALSE(
        rig.tracker.field_occupied(Level::L1, set, 0, FieldKind::Data));
  }
  SECTION("silent non-user corruption leaves scope without loss") {
    Rig rig(SchemeKind::Parity);
    const std::uint64_t os_addr = 1ull << 20;
    rig.make_dirty(os_addr);
    rig.inject_l1(os_addr, FieldKind::Data, 2, 5 * 64 + 3);
    const std::uint32_t set = rig.engine.l1().set_of(os_addr);
    const std::uint32_t way = std::uint32_t(
        rig.engine.l1().find(set, rig.engine.l1().tag_of(os_addr)));
    REQUIRE(rig.tracker.on_evict(rig.engine.l1(), set, way) ==
            TrackerAction::None);
    REQUIRE(n_outcomes(rig.counters, OutcomeClass::SdcDfNud) == 1);
    REQUIRE(rig.counters.dl_bytes_total == 0);
    REQUIRE(mask_total(rig.counters) == 0);
  }
  SECTION("a remapped dirty line loses exactly its stale words") {
    Rig rig(SchemeKind::Parity);
    rig.make_dirty(0);
    rig.inject_l1(0, FieldKind::Tag, 2, 0);  // books 2 x 64 B
    const std::uint64_t remapped = 3ull << 14;
    // Three words rewritten under the new identity.
    for (std::uint32_t w = 0; w < 3; ++w)
      REQUIRE_FALSE(rig.write(remapped + 8 * w));
    const std::uint32_t set = rig.engine.l1().set_of(remapped);
    const std::uint32_t way = std::uint32_t(
        rig.engine.l1().find(set, rig.engine.l1().tag_of(remapped)));
    REQUIRE(rig.tracker.on_evict(rig.engine.l1(), set, way) ==
            TrackerAction::None);
    REQUIRE(dl_bytes(rig.counters, DlKind::LinePropagateLower) == 64 - 24);
    REQUIRE(rig.counters.dl_bytes_total == 128 + (64 - 24));
  }
}

TEST_CASE("a reboot flush masks every fault that did not cause it") {
  Rig rig(SchemeKind::Parity);
  rig.make_dirty(0);            // group 0: will reboot on read
  rig.fill_clean(kL1SetStride);  // a different set member, different group
  rig.inject_l1(0, FieldKind::Data, 1, 9);
  rig.inject_l1(kL1SetStride, FieldKind::Data, 2, 70);
  REQUIRE(rig.read(0));
  REQUIRE(rig.counters.reboots == 1);
  REQUIRE(n_masks(rig.counters, MaskKind::Reboot) == 1);  // the bystander
  for (const FaultRecord& r : rig.tracker.records()) REQUIRE_FALSE(r.live);
  rig.tracker.finalize();
  REQUIRE(rig.counters.untouched == 0);
}

TEST_CASE("faults never touched count as untouched at the end") {
  Rig rig(SchemeKind::Secded);
  rig.fill_clean(0);
  rig.fill_clean(64);
  rig.inject_l1(0, FieldKind::Data, 1, 3);
  rig.inject_l1(64, FieldKind::Tag, 1, 3);
  rig.tracker.finalize();
  REQUIRE(rig.counters.untouched == 2);
  REQUIRE(outcome_total(rig.counters) == 0);
  REQUIRE(mask_total(rig.counters) == 0);
}

TEST_CASE("fills copy data, never faults") {
  // Payload placed only in L2; a later L1 fill must arrive fault-free.
  Rig rig(SchemeKind::Parity);
  rig.fill_clean(0);
  rig.inject_l2(0, FieldKind::Data, 2, 6 * 64 + 1);
  // Evict the clean L1 copy so the next read re-fills from faulty L2.
  for (std::uint64_t k = 1; k <= 8; ++k)
    REQUIRE_FALSE(rig.read(k * kL1SetStride));
  // Read a word the fault does not overlap: the L2 hook sees no flips.
  REQUIRE_FALSE(rig.read(0));
  CacheLine& l1ln = rig.l1_line(0);
  REQUIRE_FALSE(l1ln.data_fault.present);
  REQUIRE(rig.tracker.field_occupied(
      Level::L2, rig.engine.l2().set_of(0),
      std::uint32_t(rig.engine.l2().find(rig.engine.l2().set_of(0),
                                         rig.engine.l2().tag_of(0))),
      FieldKind::Data));
  REQUIRE(outcome_total(rig.counters) == 0);
  // Reading the faulted word is served from the clean L1 copy.
  REQUIRE_FALSE(rig.read(6 * 8));
  REQUIRE(outcome_total(rig.counters) == 0);
}

TEST_CASE("an inclusion eviction merges the dirty L1 copy first") {
  Rig rig(SchemeKind::Parity);
  rig.fill_clean(0);
  rig.inject_l2(0, FieldKind::Data, 2, 100);
  REQUIRE_FALSE(rig.write(0));  // dirty in L1; L2 copy still faulty
  // Eight L2-set conflicts evict the faulty L2 line; the dirty L1 copy
  // merges into it on the way out, masking the fault before judgment.
  for (std::uint64_t k = 1; k <= 8; ++k)
    REQUIRE_FALSE(rig.read(k * kL2SetStride));
  REQUIRE(n_masks(rig.counters, MaskKind::Update) == 1);
  REQUIRE(outcome_total(rig.counters) == 0);
  REQUIRE(rig.counters.dl_bytes_total == 0);
  REQUIRE(rig.counters.reboots == 0);
  REQUIRE(rig.engine.l2().find(rig.engine.l2().set_of(0),
                               rig.engine.l2().tag_of(0)) == -1);
  REQUIRE(rig.engine.l1().find(rig.engine.l1().set_of(0),
                               rig.engine.l1().tag_of(0)) == -1);
}

TEST_CASE("payload traffic can bypass L1 while overhead still fills it") {
  EngineConfig ecfg;
  ecfg.user_fill_l2_only = true;
  Rig rig(SchemeKind::Parity, ManifestationParams{}, ecfg);
  REQUIRE_FALSE(rig.read(0));  // user payload: L2 only
  REQUIRE(rig.engine.l1().find(rig.engine.l1().set_of(0),
                               rig.engine.l1().tag_of(0)) == -1);
  REQUIRE(rig.engine.l2().find(rig.engine.l2().set_of(0),
                               rig.engine.l2().tag_of(0)) >= 0);
  const bool r = rig.engine.access(
      {1ull << 20, AccessKind::ReadWord, AccessOrigin::OsOverhead}, rig.tick++);
  REQUIRE_FALSE(r);
  REQUIRE(rig.engine.l1().find(rig.engine.l1().set_of(1ull << 20),
                               rig.engine.l1().tag_of(1ull << 20)) >= 0);

  // A detect-on-clean at L2 refetches there, exactly as at L1.
  rig.inject_l2(0, FieldKind::Data, 1, 9);
  REQUIRE_FALSE(rig.read(8));
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::DueDf) == 0);  // word 1 clean
  REQUIRE_FALSE(rig.read(0));  // the faulted word: detect, refetch
  REQUIRE(n_outcomes(rig.counters, OutcomeClass::DueDf) == 1);
  REQUIRE(n_masks(rig.counters, MaskKind::DetectValid) == 1);
  const std::uint32_t set = rig.engine.l2().set_of(0);
  const int way = rig.engine.l2().find(set, rig.engine.l2().tag_of(0));
  REQUIRE(way >= 0);
  REQUIRE_FALSE(rig.engine.l2().at(set, std::uint32_t(way)).data_fault.present);
}
