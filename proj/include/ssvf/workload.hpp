#pragma once
// I/O request streams and their expansion into the word-granular cache
// accesses the replay engine consumes.
//
// A read request touches every word it covers. A write request updates
// whole lines where it covers them fully and writes individual words at
// ragged edges. Interleaved with the user payload runs a configurable
// amount of non-user (OS, metadata, interrupt path) traffic directed at
// the non-user region.

#include <cctype>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssvf/cache.hpp"
#include "ssvf/rng.hpp"

namespace ssvf {

enum class RequestOp : std::uint8_t { Read, Write };

struct Request {
  std::uint64_t addr = 0;   // byte address in the user region
  std::uint64_t size = 0;   // bytes
  RequestOp op = RequestOp::Read;
  double time_s = 0.0;
};

enum class AddressPattern : std::uint8_t { Sequential, Random };

struct SyntheticSpec {
  std::uint64_t requests = 250;
  std::uint64_t size_kb = 4;
  double inter_arrival_us = 100.0;
  AddressPattern pattern = AddressPattern::Sequential;
  double read_fraction = 0.5;
  std::uint64_t seed = 1;

  void validate() const {
    if (requests == 0) throw std::invalid_argument("requests must be positive");
    if (size_kb == 0) throw std::invalid_argument("size_kb must be positive");
    if (inter_arrival_us < 0)
      throw std::invalid_argument("inter_arrival_us must be non-negative");
    if (read_fraction < 0 || read_fraction > 1)
      throw std::invalid_argument("read_fraction must lie in [0, 1]");
  }
};

// Requests draw op and (for Random) placement from the given stream; arrival
// times step deterministically so two generations with one seed agree.
inline std::vector<Request> gen_synthetic(const SyntheticSpec& spec,
                                          const AddressMap& map) {
  spec.validate();
  if (map.user_bytes == 0) throw std::invalid_argument("empty user region");
  const std::uint64_t size = spec.size_kb * 1024;
  if (size > map.user_bytes)
    throw std::invalid_argument("request larger than the user region");
  Rng rng = Rng::derive(spec.seed, 0x776b6c64u /* "wkld" */);
  std::vector<Request> out;
  out.reserve(spec.requests);
  std::uint64_t offset = 0;
  double t = 0.0;
  const std::uint64_t span = map.user_bytes - size + 1;
  for (std::uint64_t i = 0; i < spec.requests; ++i) {
    Request r;
    r.size = size;
    r.time_s = t;
    t += spec.inter_arrival_us * 1e-6;
    r.op = rng.bernoulli(spec.read_fraction) ? RequestOp::Read
                                             : RequestOp::Write;
    if (spec.pattern == AddressPattern::Sequential) {
      if (offset + size > map.user_bytes) offset = 0;
      r.addr = offset;
      offset += size;
    } else {
      r.addr = rng.below(span);
    }
    out.push_back(r);
  }
  return out;
}

// Trace rows: ASU,LBA,size_bytes,opcode,timestamp. Opcode is R or W in
// either case. Addresses fold into the user region.
inline std::vector<Request> parse_trace(std::istream& in,
                                        const AddressMap& map) {
  if (map.user_bytes == 0) throw std::invalid_argument("empty user region");
  std::vector<Request> out;
  std::string line;
  std::uint64_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("trace line " + std::to_string(lineno) + ": " +
                             what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    // Tolerate \r\n traces.
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field[5];
    for (int i = 0; i < 5; ++i)
      if (!std::getline(row, field[i], ','))
        fail("expected 5 comma-separated fields");
    std::uint64_t asu = 0, lba = 0, size = 0;
    double ts = 0.0;
    try {
      asu = std::stoull(field[0]);
      lba = std::stoull(field[1]);
      size = std::stoull(field[2]);
      ts = std::stod(field[4]);
    } catch (const std::exception&) {
      fail("malformed numeric field");
    }
    if (size == 0) fail("zero-byte request");
    std::string op = field[3];
    for (char& c : op) c = char(std::toupper(static_cast<unsigned char>(c)));
    Request r;
    if (op == "R")
      r.op = RequestOp::Read;
    else if (op == "W")
      r.op = RequestOp::Write;
    else
      fail("opcode must be R or W");
    // Sector-addressed LBA plus a per-ASU stride, wrapped onto the region.
    const std::uint64_t raw = lba * 512 + (asu << 36);
    if (size >= map.user_bytes) fail("request larger than the user region");
    r.addr = raw % (map.user_bytes - size + 1);
    r.size = size;
    r.time_s = ts;
    out.push_back(r);
  }
  return out;
}

enum class AccessKind : std::uint8_t { ReadWord, WriteWord, UpdateLine };
enum class AccessOrigin : std::uint8_t { UserPayload, OsOverhead };

struct AccessEvent {
  std::uint64_t addr;        // byte address of the word or line
  AccessKind kind;
  AccessOrigin origin;
};

struct ExpandSpec {
  // Non-user accesses interleaved per user line-sized event; fractional
  // ratios accumulate.
  double os_overhead_ratio = 1.5;
  double os_write_fraction = 0.3;
  std::uint64_t seed = 1;

  void validate() const {
    if (os_overhead_ratio < 0)
      throw std::invalid_argument("os_overhead_ratio must be non-negative");
    if (os_write_fraction < 0 || os_write_fraction > 1)
      throw std::invalid_argument("os_write_fraction must lie in [0, 1]");
  }
};

// Flatten one request into word/line accesses, appending to `out`.
inline void expand_request(const Request& r, const CacheGeometry& geom,
                           std::vector<AccessEvent>& out) {
  const std::uint64_t wb = geom.word_bytes;
  const std::uint64_t lb = geom.line_bytes;
  const std::uint64_t first_word = r.addr / wb;
  const std::uint64_t last_word = (r.addr + r.size - 1) / wb;
  if (r.op == RequestOp::Read) {
    for (std::uint64_t w = first_word; w <= last_word; ++w)
      out.push_back({w * wb, AccessKind::ReadWord, AccessOrigin::UserPayload});
    return;
  }
  // Writes: full-line spans become line updates, ragged edges word writes.
  std::uint64_t w = first_word;
  while (w <= last_word) {
    const std::uint64_t line = (w * wb) / lb;
    const std::uint64_t line_first = line * lb / wb;
    const std::uint64_t line_last = line_first + geom.words_per_line() - 1;
    if (w == line_first && last_word >= line_last) {
      out.push_back(
          {line * lb, AccessKind::UpdateLine, AccessOrigin::UserPayload});
      w = line_last + 1;
    } else {
      const std::uint64_t stop = std::min(last_word, line_last);
      for (; w <= stop; ++w)
        out.push_back(
            {w * wb, AccessKind::WriteWord, AccessOrigin::UserPayload});
    }
  }
}

// Full replay stream: user events from the requests, non-user events woven
// in proportionally to user line traffic.
inline std::vector<AccessEvent> build_stream(const std::vector<Request>& reqs,
                                             const CacheGeometry& geom,
                                             const AddressMap& map,
                                             const ExpandSpec& spec) {
  spec.validate();
  std::vector<AccessEvent> out;
  Rng rng = Rng::derive(spec.seed, 0x6f736f76u /* "osov" */);
  double os_credit = 0.0;
  const bool have_os = map.os_bytes > 0 && spec.os_overhead_ratio > 0;
  for (const Request& r : reqs) {
    expand_request(r, geom, out);
    if (!have_os) continue;
    const std::uint64_t first_line = r.addr / geom.line_bytes;
    const std::uint64_t last_line = (r.addr + r.size - 1) / geom.line_bytes;
    os_credit += double(last_line - first_line + 1) * spec.os_overhead_ratio;
    while (os_credit >= 1.0) {
      os_credit -= 1.0;
      const std::uint64_t words = map.os_bytes / geom.word_bytes;
      const std::uint64_t addr =
          map.user_bytes + rng.below(words) * geom.word_bytes;
      const AccessKind k = rng.bernoulli(spec.os_write_fraction)
                               ? AccessKind::WriteWord
                               : AccessKind::ReadWord;
      out.push_back({addr, k, AccessOrigin::OsOverhead});
    }
  }
  return out;
}

}  // namespace ssvf
