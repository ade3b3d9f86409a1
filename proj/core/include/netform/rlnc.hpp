#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "netform/galois.hpp"
#include "netform/random.hpp"

// Random linear network coding: packet representation, relay-side
// recombination, terminal-set bookkeeping and terminal-side decoding.

namespace netform::rlnc {

using galois::GfElement;

// Multi-source multicast flow description: sources 0..num_sources-1, each
// with its own terminal index set.
struct FlowSpec {
  std::size_t num_sources = 0;
  std::vector<std::vector<int>> terminals_of;  // T_h per source h

  std::set<int> all_terminals() const;
  std::vector<std::size_t> sources_of(int terminal) const;  // H_t
};

struct Packet {
  std::int64_t stamp = 0;
  std::vector<GfElement> coeffs;   // global coefficients, one per source
  std::vector<GfElement> payload;  // encoded data symbols

  friend bool operator==(const Packet&, const Packet&) = default;
};

// Per-node packet store, grouped by time stamp with the oldest group first.
class Buffer {
 public:
  explicit Buffer(int ttl = 16) : ttl_(ttl) {}

  int ttl() const { return ttl_; }
  bool empty() const { return groups_.empty(); }
  std::size_t group_count() const { return groups_.size(); }

  void push(Packet p) { groups_[p.stamp].push_back(std::move(p)); }

  // Drops every group whose stamp has expired (now - stamp > ttl).
  void prune(std::int64_t now);

  std::optional<std::int64_t> oldest_stamp() const;
  const std::vector<Packet>* group(std::int64_t stamp) const;
  std::vector<Packet> take_group(std::int64_t stamp);

 private:
  int ttl_;
  std::map<std::int64_t, std::vector<Packet>> groups_;
};

// Source-side packet construction: the coefficient vector is the h-th unit
// vector and the payload is carried unmodified.
Packet encode_source(std::size_t h, std::vector<GfElement> data,
                     std::int64_t stamp, const FlowSpec& flows);

enum class CoeffDraw {
  uniform_full_field,  // zero draws allowed
  nonzero_only,
};

// Deterministic core of the relay recombination: output coefficients and
// payload are the same field-linear combination of the inputs, so the global
// coefficient update law holds by construction.
Packet recombine_with(std::span<const Packet> group,
                      std::span<const std::uint16_t> local_coeffs);

// Draws one local coefficient per buffered packet of the given stamp and
// combines them. Throws std::out_of_range when the stamp group is empty.
Packet recombine(const Buffer& buf, std::int64_t stamp, rng::Stream& rng,
                 CoeffDraw draw = CoeffDraw::uniform_full_field);

// Union of T_h over all sources with a nonzero coefficient in p.
std::set<int> terminal_set(const Packet& p, const FlowSpec& flows);

struct DecodeResult {
  enum class Status { decoded, missing_source, rank_deficient };
  Status status = Status::missing_source;
  std::map<std::size_t, std::vector<GfElement>> payloads;  // h -> data

  bool ok() const { return status == Status::decoded; }
};

// Attempts exact reconstruction at a terminal from packets sharing one
// stamp. Succeeds iff every source of interest has a nonzero coefficient
// column and the column-pruned coefficient matrix is full rank.
DecodeResult try_decode(std::span<const Packet> received, int terminal,
                        const FlowSpec& flows);

// Fraction of the given packets whose terminal set equals the full union of
// all terminal sets. Returns 0 for an empty input.
double anonymity_index(std::span<const Packet> in_flight,
                       const FlowSpec& flows);

// One-line log form: stamp, ':'-separated hex coefficients, payload digest.
std::string log_line(const Packet& p);

}  // namespace netform::rlnc
