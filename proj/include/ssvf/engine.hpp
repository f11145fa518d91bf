#pragma once
// Two-level replay engine: unified L1 backed by an inclusive L2, LRU
// replacement, write-back with write-allocate. Faulty lines hand control to
// the consequence tracker at the points where real hardware would consult
// the check bits: word reads and writes at the level serving them, full
// line updates, and every eviction.
//
// Fills and write-backs are transfers, not checks; corruption is not
// copied between levels, it acts where it lives.

#include <cstdint>

#include "ssvf/cache.hpp"
#include "ssvf/consequence.hpp"
#include "ssvf/workload.hpp"

namespace ssvf {

struct EngineConfig {
  // Payload lines bypass L1 (DMA-style placement); overhead traffic still
  // runs through both levels.
  bool user_fill_l2_only = false;
};

class AccessEngine {
 public:
  AccessEngine(const CacheGeometry& geom, const AddressMap& map,
               EngineConfig cfg = {})
      : geom_(geom),
        map_(map),
        cfg_(cfg),
        l1_(Level::L1, geom),
        l2_(Level::L2, geom) {}

  CacheLevel& l1() { return l1_; }
  CacheLevel& l2() { return l2_; }
  const CacheLevel& l1() const { return l1_; }
  const CacheLevel& l2() const { return l2_; }

  void set_tracker(ConsequenceTracker* t) { tracker_ = t; }

  void reset() {
    l1_.reset();
    l2_.reset();
  }

  // Returns true when the access set off a reboot; the caller owns the
  // flush (tracker reboot sweep plus reset()).
  bool access(const AccessEvent& ev, std::uint64_t tick) {
    const bool through_l1 = ev.origin == AccessOrigin::OsOverhead ||
                            !cfg_.user_fill_l2_only;
    switch (ev.kind) {
      case AccessKind::ReadWord:
        return read_word(ev.addr, tick, through_l1);
      case AccessKind::WriteWord:
        return write_word(ev.addr, tick, through_l1);
      case AccessKind::UpdateLine:
        return update_line(ev.addr, tick, through_l1);
    }
    return false;
  }

 private:
  static bool faulty(const CacheLine& ln) {
    return ln.tag_fault.present || ln.data_fault.present;
  }

  static bool lookup(CacheLevel& lvl, std::uint64_t addr, std::uint32_t& set,
                     std::uint32_t& way) {
    set = lvl.set_of(addr);
    const int w = lvl.find(set, lvl.tag_of(addr));
    if (w < 0) return false;
    way = std::uint32_t(w);
    return true;
  }

  std::uint32_t word_of(std::uint64_t addr) const {
    return std::uint32_t(addr % geom_.line_bytes / geom_.word_bytes);
  }

  bool read_word(std::uint64_t addr, std::uint64_t tick, bool through_l1) {
    const std::uint32_t word = word_of(addr);
    if (through_l1) {
      std::uint32_t set, way;
      if (lookup(l1_, addr, set, way)) {
        CacheLine& ln = l1_.at(set, way);
        ln.last_used = tick;
        if (tracker_ && faulty(ln)) {
          const TrackerAction a = tracker_->on_read(l1_, set, way, word);
          if (a == TrackerAction::Reboot) return true;
          if (a == TrackerAction::InvalidateRefetch)
            ln.clear_to_invalid();
          else
            return false;
        } else {
          return false;
        }
      }
    }
    {
      std::uint32_t set, way;
      if (lookup(l2_, addr, set, way)) {
        CacheLine& ln = l2_.at(set, way);
        ln.last_used = tick;
        bool refetch = false;
        if (tracker_ && faulty(ln)) {
          const TrackerAction a = tracker_->on_read(l2_, set, way, word);
          if (a == TrackerAction::Reboot) return true;
          if (a == TrackerAction::InvalidateRefetch) {
            ln.clear_to_invalid();
            refetch = true;
          }
        }
        if (!refetch) {
          if (through_l1)
            return install_line(l1_, addr, LineState::Valid, tick, nullptr);
          return false;
        }
      }
    }
    // Memory fetch; inclusive, so L2 first.
    if (install_line(l2_, addr, LineState::Valid, tick, nullptr)) return true;
    if (through_l1)
      return install_line(l1_, addr, LineState::Valid, tick, nullptr);
    return false;
  }

  bool write_word(std::uint64_t addr, std::uint64_t tick, bool through_l1) {
    const std::uint32_t word = word_of(addr);
    CacheLevel& target = through_l1 ? l1_ : l2_;
    std::uint32_t set, way;
    if (lookup(target, addr, set, way)) {
      CacheLine& ln = target.at(set, way);
      ln.last_used = tick;
      if (tracker_ && faulty(ln)) {
        const TrackerAction a = tracker_->on_write(target, set, way, word);
        if (a == TrackerAction::Reboot) return true;
      }
      ln.state = LineState::Modified;
      return false;
    }
    // Write-allocate. The line transfer itself consumes no words.
    if (through_l1) {
      std::uint32_t l2set, l2way;
      if (!lookup(l2_, addr, l2set, l2way)) {
        if (install_line(l2_, addr, LineState::Valid, tick, nullptr))
          return true;
      } else {
        l2_.at(l2set, l2way).last_used = tick;
      }
    }
    std::uint32_t nway;
    if (install_line(target, addr, LineState::Valid, tick, &nway)) return true;
    CacheLine& ln = target.at(target.set_of(addr), nway);
    ln.state = LineState::Modified;
    return false;
  }

  bool update_line(std::uint64_t addr, std::uint64_t tick, bool through_l1) {
    CacheLevel& target = through_l1 ? l1_ : l2_;
    std::uint32_t set, way;
    if (lookup(target, addr, set, way)) {
      CacheLine& ln = target.at(set, way);
      ln.last_used = tick;
      if (tracker_ && faulty(ln)) {
        const TrackerAction a = tracker_->on_update(target, set, way);
        if (a == TrackerAction::Reboot) return true;
      }
      ln.state = LineState::Modified;
      ln.overwritten_words = 0;
      return false;
    }
    if (through_l1) {
      // Ensure inclusion; the old data is irrelevant under a full
      // overwrite, so a bare placeholder suffices below.
      std::uint32_t l2set, l2way;
      if (!lookup(l2_, addr, l2set, l2way)) {
        if (install_line(l2_, addr, LineState::Valid, tick, nullptr))
          return true;
      } else {
        l2_.at(l2set, l2way).last_used = tick;
      }
    }
    return install_line(target, addr, LineState::Modified, tick, nullptr);
  }

  // Pick a victim, run its eviction consequences and write-back, install
  // the new line. True means a reboot fired and the install was abandoned.
  bool install_line(CacheLevel& lvl, std::uint64_t addr, LineState st,
                    std::uint64_t tick, std::uint32_t* out_way) {
    const std::uint32_t set = lvl.set_of(addr);
    const std::uint32_t way = lvl.victim_way(set);
    CacheLine& ln = lvl.at(set, way);
    const bool was_present = state_present(ln.state);
    const std::uint64_t victim_addr =
        was_present ? lvl.byte_addr_of(ln.tag, set) : 0;
    // Inclusion first: a dirty L1 copy merges into the victim before the
    // victim's own send-off is judged.
    if (was_present && lvl.level() == Level::L2) {
      if (back_invalidate_l1(victim_addr, lvl, set, way, tick)) return true;
    }
    if (tracker_ && faulty(ln)) {
      // Covers occupied lines and faults parked in empty ways alike.
      if (tracker_->on_evict(lvl, set, way) == TrackerAction::Reboot)
        return true;
    }
    if (was_present && state_dirty(ln.state) && lvl.level() == Level::L1) {
      if (writeback_to_l2(victim_addr, tick)) return true;
    }
    // A dirty L2 victim drains to memory; nothing further to model.
    ln.tag = lvl.tag_of(addr);
    ln.state = st;
    ln.owner = map_.classify(addr);
    ln.last_used = tick;
    ln.tag_fault = FaultMeta{};
    ln.data_fault = FaultMeta{};
    ln.overwritten_words = 0;
    if (out_way) *out_way = way;
    return false;
  }

  // An L1 copy of a departing L2 line must leave too; a dirty copy merges
  // into the victim on its way out.
  bool back_invalidate_l1(std::uint64_t victim_addr, CacheLevel& l2lvl,
                          std::uint32_t vset, std::uint32_t vway,
                          std::uint64_t tick) {
    std::uint32_t set, way;
    if (!lookup(l1_, victim_addr, set, way)) return false;
    CacheLine& copy = l1_.at(set, way);
    if (tracker_ && faulty(copy)) {
      if (tracker_->on_evict(l1_, set, way) == TrackerAction::Reboot)
        return true;
    }
    if (state_dirty(copy.state)) {
      CacheLine& victim = l2lvl.at(vset, vway);
      if (tracker_ && faulty(victim)) {
        if (tracker_->on_update(l2lvl, vset, vway) == TrackerAction::Reboot)
          return true;
      }
      victim.state = LineState::Modified;
      victim.overwritten_words = 0;
      (void)tick;
    }
    copy.clear_to_invalid();
    return false;
  }

  // Dirty L1 line leaving: refresh the L2 copy, or allocate one when a tag
  // remap orphaned it.
  bool writeback_to_l2(std::uint64_t addr, std::uint64_t tick) {
    std::uint32_t set, way;
    if (lookup(l2_, addr, set, way)) {
      CacheLine& ln = l2_.at(set, way);
      ln.last_used = tick;
      if (tracker_ && faulty(ln)) {
        if (tracker_->on_update(l2_, set, way) == TrackerAction::Reboot)
          return true;
      }
      ln.state = LineState::Modified;
      ln.overwritten_words = 0;
      return false;
    }
    return install_line(l2_, addr, LineState::Modified, tick, nullptr);
  }

  CacheGeometry geom_;
  AddressMap map_;
  EngineConfig cfg_;
  CacheLevel l1_;
  CacheLevel l2_;
  ConsequenceTracker* tracker_ = nullptr;
};

}  // namespace ssvf
