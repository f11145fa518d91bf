#pragma once
// Count-based model of per-word / per-tag ECC behavior. A fault is a
// contiguous run of flipped bits; what a code does with it depends only on
// how many flips land in each protected subcode, never on the exact bit
// positions inside the subcode.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssvf {

enum class SchemeKind : std::uint8_t {
  None,
  Parity,
  InterleavedParity,
  Secded,
  InterleavedSecded,
  Dected,
};

inline const char* scheme_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::None: return "none";
    case SchemeKind::Parity: return "parity";
    case SchemeKind::InterleavedParity: return "interleaved_parity";
    case SchemeKind::Secded: return "secded";
    case SchemeKind::InterleavedSecded: return "interleaved_secded";
    case SchemeKind::Dected: return "dected";
  }
  return "?";
}

inline bool scheme_is_interleaved(SchemeKind k) {
  return k == SchemeKind::InterleavedParity || k == SchemeKind::InterleavedSecded;
}

struct ProtectionScheme {
  SchemeKind kind = SchemeKind::Secded;
  unsigned interleave_ways = 1;

  static ProtectionScheme make(SchemeKind k, unsigned ways = 0) {
    ProtectionScheme s;
    s.kind = k;
    s.interleave_ways = ways ? ways : (scheme_is_interleaved(k) ? 2u : 1u);
    s.validate();
    return s;
  }

  void validate() const {
    if (interleave_ways == 0)
      throw std::invalid_argument("interleave_ways must be positive");
    if (scheme_is_interleaved(kind) && interleave_ways < 2)
      throw std::invalid_argument(
          "interleaved schemes need interleave_ways >= 2");
    if (!scheme_is_interleaved(kind) && interleave_ways != 1)
      throw std::invalid_argument(
          "linear schemes use exactly one subcode per span");
  }
};

// Contiguous run of flipped bits: bits [first_bit, first_bit + flips).
struct ErrorPattern {
  unsigned flips = 1;
  unsigned first_bit = 0;
};

enum class Verdict : std::uint8_t { NoError, Dce, Due, Sdc };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::NoError: return "no_error";
    case Verdict::Dce: return "dce";
    case Verdict::Due: return "due";
    case Verdict::Sdc: return "sdc";
  }
  return "?";
}

// Detection dominates silent corruption: once any subcode raises an
// uncorrectable-detected error the controller acts on the detection, so
// Due wins over Sdc, which wins over "everything corrected".
inline Verdict combine_verdicts(Verdict a, Verdict b) {
  if (a == Verdict::Due || b == Verdict::Due) return Verdict::Due;
  if (a == Verdict::Sdc || b == Verdict::Sdc) return Verdict::Sdc;
  if (a == Verdict::Dce || b == Verdict::Dce) return Verdict::Dce;
  return Verdict::NoError;
}

// Flip-count rule table for one subcode. Interleaved kinds classify each
// subcode by their base code's rule.
inline Verdict classify_subcode(SchemeKind kind, unsigned flips) {
  if (flips == 0) return Verdict::NoError;
  switch (kind) {
    case SchemeKind::None:
      return Verdict::Sdc;
    case SchemeKind::Parity:
    case SchemeKind::InterleavedParity:
      return (flips % 2 == 1) ? Verdict::Due : Verdict::Sdc;
    case SchemeKind::Secded:
    case SchemeKind::InterleavedSecded:
      if (flips == 1) return Verdict::Dce;
      if (flips == 2) return Verdict::Due;
      return Verdict::Sdc;
    case SchemeKind::Dected:
      if (flips <= 2) return Verdict::Dce;
      if (flips == 3) return Verdict::Due;
      return Verdict::Sdc;
  }
  throw std::invalid_argument("unknown scheme kind");
}

// Per-subcode flip counts for a contiguous run spread round-robin over
// `ways` interleaved subcodes. Counts differ by at most one and their sum
// is the input; which physical subcode holds the larger share depends on
// the start position, but classification only consumes the multiset.
inline std::vector<unsigned> interleave_split(unsigned ways, unsigned flips) {
  if (ways == 0) throw std::invalid_argument("ways must be positive");
  std::vector<unsigned> counts(ways, flips / ways);
  for (unsigned i = 0; i < flips % ways; ++i) counts[i] += 1;
  return counts;
}

// Bucket a contiguous run by word index. A run is confined to a block's
// field, so it touches at most two adjacent words.
inline std::map<unsigned, unsigned> split_pattern(const ErrorPattern& p,
                                                  unsigned word_bits,
                                                  unsigned field_bits) {
  if (word_bits == 0 || field_bits % word_bits != 0)
    throw std::invalid_argument("word_bits must divide the field width");
  if (p.flips == 0) throw std::invalid_argument("pattern needs at least one flip");
  if (p.first_bit + p.flips > field_bits)
    throw std::out_of_range("pattern exceeds field bounds");
  std::map<unsigned, unsigned> out;
  for (unsigned i = p.first_bit; i < p.first_bit + p.flips; ++i)
    out[i / word_bits] += 1;
  return out;
}

// Verdict for `flips` contiguous flips inside one codeword span.
inline Verdict classify_span(const ProtectionScheme& s, unsigned flips) {
  s.validate();
  if (flips == 0) return Verdict::NoError;
  Verdict v = Verdict::NoError;
  for (unsigned c : interleave_split(s.interleave_ways, flips))
    if (c > 0) v = combine_verdicts(v, classify_subcode(s.kind, c));
  return v;
}

// Verdict for a pattern confined to one codeword span (a data word or the
// tag field). Callers split multi-word patterns first.
inline Verdict classify_field(const ProtectionScheme& s, const ErrorPattern& p,
                              unsigned span_bits) {
  if (p.first_bit + p.flips > span_bits)
    throw std::out_of_range("pattern exceeds codeword span");
  return classify_span(s, p.flips);
}

// Per-word verdicts for a pattern anywhere in a multi-word data field.
inline std::map<unsigned, Verdict> word_verdicts(const ProtectionScheme& s,
                                                 const ErrorPattern& p,
                                                 unsigned word_bits,
                                                 unsigned field_bits) {
  std::map<unsigned, Verdict> out;
  for (const auto& [word, flips] : split_pattern(p, word_bits, field_bits))
    out[word] = classify_span(s, flips);
  return out;
}

// Combined verdict across the whole data field.
inline Verdict classify_data_field(const ProtectionScheme& s,
                                   const ErrorPattern& p, unsigned word_bits,
                                   unsigned field_bits) {
  Verdict v = Verdict::NoError;
  for (const auto& [word, wv] : word_verdicts(s, p, word_bits, field_bits))
    v = combine_verdicts(v, wv);
  return v;
}

}  // namespace ssvf
