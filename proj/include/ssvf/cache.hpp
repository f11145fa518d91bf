#pragma once
// Cache structures: geometry, the user/OS/unmapped physical address map,
// line state, and per-level storage with LRU replacement. Pure mechanics;
// fault consequences live in the tracker and the access engine.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssvf/ecc.hpp"

namespace ssvf {

enum class Level : std::uint8_t { L1 = 0, L2 = 1 };

inline const char* level_name(Level l) { return l == Level::L1 ? "l1" : "l2"; }

enum class LineState : std::uint8_t {
  Invalid = 0,
  Valid,
  Modified,
  MesiExclusive,
  MesiShared,
};

inline bool state_present(LineState s) { return s != LineState::Invalid; }
inline bool state_dirty(LineState s) { return s == LineState::Modified; }
// Exclusive/Shared carry no dirty data; everywhere that matters they act
// like Valid.
inline bool state_clean_valid(LineState s) {
  return s == LineState::Valid || s == LineState::MesiExclusive ||
         s == LineState::MesiShared;
}

inline const char* state_name(LineState s) {
  switch (s) {
    case LineState::Invalid: return "invalid";
    case LineState::Valid: return "valid";
    case LineState::Modified: return "modified";
    case LineState::MesiExclusive: return "exclusive";
    case LineState::MesiShared: return "shared";
  }
  return "?";
}

enum class Ownership : std::uint8_t { UserData = 0, NonUserData = 1, InvalidSpace = 2 };

inline const char* ownership_name(Ownership o) {
  switch (o) {
    case Ownership::UserData: return "user";
    case Ownership::NonUserData: return "non_user";
    case Ownership::InvalidSpace: return "invalid_space";
  }
  return "?";
}

struct CacheGeometry {
  std::uint32_t l1_sets = 256;
  std::uint32_t l1_ways = 8;
  std::uint32_t l2_sets = 4096;
  std::uint32_t l2_ways = 8;
  std::uint32_t line_bytes = 64;
  std::uint32_t word_bytes = 8;
  std::uint32_t tag_bits = 32;

  std::uint32_t words_per_line() const { return line_bytes / word_bytes; }
  std::uint32_t word_bits() const { return word_bytes * 8; }
  std::uint32_t data_bits() const { return line_bytes * 8; }
  std::uint32_t sets(Level l) const { return l == Level::L1 ? l1_sets : l2_sets; }
  std::uint32_t ways(Level l) const { return l == Level::L1 ? l1_ways : l2_ways; }
  std::uint64_t lines(Level l) const {
    return std::uint64_t(sets(l)) * ways(l);
  }

  void validate() const {
    auto pow2 = [](std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; };
    if (!pow2(l1_sets) || !pow2(l2_sets))
      throw std::invalid_argument("set counts must be powers of two");
    if (l1_ways == 0 || l2_ways == 0)
      throw std::invalid_argument("way counts must be positive");
    if (!pow2(line_bytes) || !pow2(word_bytes) || word_bytes == 0 ||
        line_bytes % word_bytes != 0 || line_bytes < word_bytes)
      throw std::invalid_argument("line_bytes must be a power-of-two multiple of word_bytes");
    if (tag_bits < 4 || tag_bits > 32)
      throw std::invalid_argument("tag_bits must lie in [4, 32]");
    if (words_per_line() > 64)
      throw std::invalid_argument("at most 64 words per line supported");
  }
};

// Physical space is carved into a user-buffer region, an OS/application
// region, and an unmapped tail: [0, user) | [user, user+os) | rest.
struct AddressMap {
  std::uint64_t user_bytes = 0;
  std::uint64_t os_bytes = 0;
  std::uint64_t phys_bytes = 0;

  static AddressMap from_fractions(std::uint64_t phys, double user_frac,
                                   double os_frac, std::uint32_t line_bytes) {
    if (user_frac < 0 || os_frac < 0 || user_frac + os_frac > 1.0)
      throw std::invalid_argument("region fractions must be non-negative and sum to at most 1");
    AddressMap m;
    m.phys_bytes = phys;
    auto align = [&](double f) {
      auto b = static_cast<std::uint64_t>(f * static_cast<double>(phys));
      return b - b % line_bytes;
    };
    m.user_bytes = align(user_frac);
    m.os_bytes = align(os_frac);
    return m;
  }

  std::uint64_t user_base() const { return 0; }
  std::uint64_t os_base() const { return user_bytes; }

  Ownership classify(std::uint64_t addr) const {
    if (addr < user_bytes) return Ownership::UserData;
    if (addr < user_bytes + os_bytes) return Ownership::NonUserData;
    return Ownership::InvalidSpace;
  }
};

struct FaultMeta {
  bool present = false;
  std::uint8_t flips = 0;
  std::uint16_t first_bit = 0;

  ErrorPattern pattern() const { return ErrorPattern{flips, first_bit}; }
};

struct CacheLine {
  std::uint32_t tag = 0;
  std::uint32_t epoch = 0;
  std::uint64_t last_used = 0;
  LineState state = LineState::Invalid;
  Ownership owner = Ownership::InvalidSpace;
  FaultMeta tag_fault;
  FaultMeta data_fault;
  // Words rewritten since a silent tag corruption remapped this line; the
  // stale remainder is what an eviction write-back can lose.
  std::uint64_t overwritten_words = 0;

  void clear_to_invalid() {
    state = LineState::Invalid;
    owner = Ownership::InvalidSpace;
    tag = 0;
    tag_fault = FaultMeta{};
    data_fault = FaultMeta{};
    overwritten_words = 0;
    last_used = 0;
  }
};

inline std::uint32_t log2_u32(std::uint32_t v) {
  std::uint32_t r = 0;
  while ((1u << r) < v) ++r;
  return r;
}

class CacheLevel {
 public:
  CacheLevel() = default;
  CacheLevel(Level level, const CacheGeometry& g)
      : level_(level),
        sets_(g.sets(level)),
        ways_(g.ways(level)),
        index_bits_(log2_u32(g.sets(level))),
        offset_bits_(log2_u32(g.line_bytes)),
        tag_bits_(g.tag_bits),
        lines_(std::size_t(sets_) * ways_) {}

  Level level() const { return level_; }
  std::uint32_t sets() const { return sets_; }
  std::uint32_t ways() const { return ways_; }
  std::uint32_t index_bits() const { return index_bits_; }

  std::uint64_t line_addr(std::uint64_t byte_addr) const {
    return byte_addr >> offset_bits_;
  }
  std::uint32_t set_of(std::uint64_t byte_addr) const {
    return static_cast<std::uint32_t>(line_addr(byte_addr) & (sets_ - 1));
  }
  std::uint32_t tag_of(std::uint64_t byte_addr) const {
    std::uint64_t t = line_addr(byte_addr) >> index_bits_;
    if (tag_bits_ < 32) t &= (1ull << tag_bits_) - 1;
    return static_cast<std::uint32_t>(t);
  }
  std::uint64_t byte_addr_of(std::uint32_t tag, std::uint32_t set) const {
    return ((std::uint64_t(tag) << index_bits_) | set) << offset_bits_;
  }
  std::uint32_t word_of(std::uint64_t byte_addr) const {
    return static_cast<std::uint32_t>((byte_addr >> 3) & ((1u << (offset_bits_ - 3)) - 1));
  }

  // Lazily re-initializes stale lines so reset() is O(1).
  CacheLine& at(std::uint32_t set, std::uint32_t way) {
    CacheLine& ln = lines_[std::size_t(set) * ways_ + way];
    if (ln.epoch != epoch_) {
      ln = CacheLine{};
      ln.epoch = epoch_;
    }
    return ln;
  }

  // Way holding a present line with this stored tag, or -1. Invalid lines
  // never match; a corrupt tag matches the address it now encodes.
  int find(std::uint32_t set, std::uint32_t tag) {
    for (std::uint32_t w = 0; w < ways_; ++w) {
      CacheLine& ln = at(set, w);
      if (state_present(ln.state) && ln.tag == tag) return static_cast<int>(w);
    }
    return -1;
  }

  // Invalid way if one exists, else least recently used.
  std::uint32_t victim_way(std::uint32_t set) {
    std::uint32_t lru = 0;
    std::uint64_t best = UINT64_MAX;
    for (std::uint32_t w = 0; w < ways_; ++w) {
      CacheLine& ln = at(set, w);
      if (!state_present(ln.state)) return w;
      if (ln.last_used < best) {
        best = ln.last_used;
        lru = w;
      }
    }
    return lru;
  }

  void reset() { ++epoch_; }

  double user_line_fraction() {
    std::uint64_t user = 0;
    for (std::uint32_t s = 0; s < sets_; ++s)
      for (std::uint32_t w = 0; w < ways_; ++w) {
        CacheLine& ln = at(s, w);
        if (state_present(ln.state) && ln.owner == Ownership::UserData) ++user;
      }
    return static_cast<double>(user) / static_cast<double>(std::uint64_t(sets_) * ways_);
  }

 private:
  Level level_ = Level::L1;
  std::uint32_t sets_ = 1;
  std::uint32_t ways_ = 1;
  std::uint32_t index_bits_ = 0;
  std::uint32_t offset_bits_ = 6;
  std::uint32_t tag_bits_ = 32;
  std::uint32_t epoch_ = 1;
  std::vector<CacheLine> lines_;
};

// Invert pattern bits in the stored tag and re-resolve what address space
// the line now claims to cache. Returns the new ownership.
inline Ownership apply_tag_flip(CacheLevel& level, std::uint32_t set,
                                CacheLine& line, const ErrorPattern& p,
                                const AddressMap& map,
                                std::uint32_t tag_bits) {
  if (p.first_bit + p.flips > tag_bits)
    throw std::out_of_range("tag flip pattern exceeds tag width");
  const std::uint64_t mask = ((p.flips >= 64 ? 0 : (1ull << p.flips)) - 1)
                             << p.first_bit;
  line.tag ^= static_cast<std::uint32_t>(mask);
  line.owner = map.classify(level.byte_addr_of(line.tag, set));
  return line.owner;
}

}  // namespace ssvf
