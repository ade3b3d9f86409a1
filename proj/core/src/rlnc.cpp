#include "netform/rlnc.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace netform::rlnc {

std::set<int> FlowSpec::all_terminals() const {
  std::set<int> out;
  for (const auto& ts : terminals_of) out.insert(ts.begin(), ts.end());
  return out;
}

std::vector<std::size_t> FlowSpec::sources_of(int terminal) const {
  std::vector<std::size_t> out;
  for (std::size_t h = 0; h < terminals_of.size(); ++h)
    if (std::find(terminals_of[h].begin(), terminals_of[h].end(), terminal) !=
        terminals_of[h].end())
      out.push_back(h);
  return out;
}

void Buffer::prune(std::int64_t now) {
  for (auto it = groups_.begin(); it != groups_.end();) {
    if (now - it->first > ttl_)
      it = groups_.erase(it);
    else
      break;  // map is stamp-ordered, later groups are younger
  }
}

std::optional<std::int64_t> Buffer::oldest_stamp() const {
  if (groups_.empty()) return std::nullopt;
  return groups_.begin()->first;
}

const std::vector<Packet>* Buffer::group(std::int64_t stamp) const {
  auto it = groups_.find(stamp);
  return it == groups_.end() ? nullptr : &it->second;
}

std::vector<Packet> Buffer::take_group(std::int64_t stamp) {
  auto it = groups_.find(stamp);
  if (it == groups_.end())
    throw std::out_of_range("Buffer::take_group: no packets with this stamp");
  std::vector<Packet> out = std::move(it->second);
  groups_.erase(it);
  return out;
}

Packet encode_source(std::size_t h, std::vector<GfElement> data,
                     std::int64_t stamp, const FlowSpec& flows) {
  if (h >= flows.num_sources)
    throw std::invalid_argument("encode_source: source index outside H");
  const std::uint8_t order = data.empty() ? 8 : data.front().order;
  Packet p;
  p.stamp = stamp;
  p.coeffs.assign(flows.num_sources, GfElement{0, order});
  p.coeffs[h] = GfElement{1, order};
  p.payload = std::move(data);
  return p;
}

Packet recombine_with(std::span<const Packet> group,
                      std::span<const std::uint16_t> local_coeffs) {
  if (group.empty())
    throw std::out_of_range("recombine_with: empty packet group");
  if (group.size() != local_coeffs.size())
    throw std::invalid_argument("recombine_with: one coefficient per packet");

  const std::uint8_t order = group.front().coeffs.empty()
                                 ? group.front().payload.front().order
                                 : group.front().coeffs.front().order;
  const galois::Field& f = galois::Field::of(order);
  const std::size_t ncoef = group.front().coeffs.size();
  const std::size_t nsym = group.front().payload.size();

  Packet out;
  out.stamp = group.front().stamp;
  out.coeffs.assign(ncoef, GfElement{0, order});
  out.payload.assign(nsym, GfElement{0, order});

  for (std::size_t j = 0; j < group.size(); ++j) {
    const Packet& p = group[j];
    if (p.stamp != out.stamp)
      throw std::invalid_argument("recombine_with: mixed stamps in group");
    if (p.coeffs.size() != ncoef || p.payload.size() != nsym)
      throw std::invalid_argument("recombine_with: inconsistent packet shapes");
    const std::uint16_t c = local_coeffs[j];
    if (c == 0) continue;
    for (std::size_t i = 0; i < ncoef; ++i)
      out.coeffs[i].value =
          f.add(out.coeffs[i].value, f.mul(c, p.coeffs[i].value));
    for (std::size_t i = 0; i < nsym; ++i)
      out.payload[i].value =
          f.add(out.payload[i].value, f.mul(c, p.payload[i].value));
  }
  return out;
}

Packet recombine(const Buffer& buf, std::int64_t stamp, rng::Stream& rng,
                 CoeffDraw draw) {
  const std::vector<Packet>* group = buf.group(stamp);
  if (group == nullptr || group->empty())
    throw std::out_of_range("recombine: no packets with this stamp");
  const std::uint8_t order = group->front().coeffs.empty()
                                 ? std::uint8_t{8}
                                 : group->front().coeffs.front().order;
  const std::uint32_t field_size = 1u << order;
  std::vector<std::uint16_t> coeffs(group->size());
  for (auto& c : coeffs) {
    c = draw == CoeffDraw::nonzero_only
            ? static_cast<std::uint16_t>(1 + rng.below(field_size - 1))
            : static_cast<std::uint16_t>(rng.below(field_size));
  }
  return recombine_with(*group, coeffs);
}

std::set<int> terminal_set(const Packet& p, const FlowSpec& flows) {
  std::set<int> out;
  for (std::size_t h = 0; h < p.coeffs.size() && h < flows.num_sources; ++h)
    if (p.coeffs[h].value != 0)
      out.insert(flows.terminals_of[h].begin(), flows.terminals_of[h].end());
  return out;
}

namespace {

// Greedily selects packet indices whose coefficient rows are linearly
// independent, stopping once the target rank is reached.
std::vector<std::size_t> independent_rows(std::span<const Packet> received,
                                          const std::vector<std::size_t>& cols,
                                          unsigned order, std::size_t target) {
  std::vector<std::size_t> chosen;
  galois::GfMatrix acc(0, 0, order);
  std::size_t rank = 0;
  for (std::size_t r = 0; r < received.size() && rank < target; ++r) {
    galois::GfMatrix trial(chosen.size() + 1, cols.size(), order);
    for (std::size_t i = 0; i < chosen.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        trial(i, j) = received[chosen[i]].coeffs[cols[j]].value;
    for (std::size_t j = 0; j < cols.size(); ++j)
      trial(chosen.size(), j) = received[r].coeffs[cols[j]].value;
    if (trial.rank() > rank) {
      chosen.push_back(r);
      ++rank;
    }
  }
  return chosen;
}

}  // namespace

DecodeResult try_decode(std::span<const Packet> received, int terminal,
                        const FlowSpec& flows) {
  DecodeResult out;
  if (received.empty()) {
    out.status = DecodeResult::Status::missing_source;
    return out;
  }
  const std::int64_t stamp = received.front().stamp;
  for (const Packet& p : received)
    if (p.stamp != stamp)
      throw std::invalid_argument("try_decode: packets must share one stamp");

  const unsigned order = received.front().coeffs.front().order;
  const auto wanted = flows.sources_of(terminal);

  // Condition 1: every source of interest appears in some packet.
  std::vector<std::size_t> nonzero_cols;
  for (std::size_t h = 0; h < flows.num_sources; ++h) {
    bool any = false;
    for (const Packet& p : received) any = any || p.coeffs[h].value != 0;
    if (any) nonzero_cols.push_back(h);
  }
  for (std::size_t h : wanted) {
    if (std::find(nonzero_cols.begin(), nonzero_cols.end(), h) ==
        nonzero_cols.end()) {
      out.status = DecodeResult::Status::missing_source;
      return out;
    }
  }

  // Condition 2: the column-pruned matrix has full column rank.
  const std::size_t ncols = nonzero_cols.size();
  const auto rows = independent_rows(received, nonzero_cols, order, ncols);
  if (rows.size() < ncols) {
    out.status = DecodeResult::Status::rank_deficient;
    return out;
  }

  galois::GfMatrix square(ncols, ncols, order);
  for (std::size_t i = 0; i < ncols; ++i)
    for (std::size_t j = 0; j < ncols; ++j)
      square(i, j) = received[rows[i]].coeffs[nonzero_cols[j]].value;

  const std::size_t nsym = received.front().payload.size();
  std::vector<std::vector<GfElement>> recovered(
      ncols, std::vector<GfElement>(
                 nsym, GfElement{0, static_cast<std::uint8_t>(order)}));
  std::vector<GfElement> y(ncols);
  for (std::size_t sym = 0; sym < nsym; ++sym) {
    for (std::size_t i = 0; i < ncols; ++i)
      y[i] = received[rows[i]].payload[sym];
    const auto x = galois::solve(square, y);
    for (std::size_t j = 0; j < ncols; ++j) recovered[j][sym] = x[j];
  }

  out.status = DecodeResult::Status::decoded;
  for (std::size_t h : wanted) {
    const auto it =
        std::find(nonzero_cols.begin(), nonzero_cols.end(), h);
    out.payloads[h] = recovered[static_cast<std::size_t>(
        std::distance(nonzero_cols.begin(), it))];
  }
  return out;
}

double anonymity_index(std::span<const Packet> in_flight,
                       const FlowSpec& flows) {
  if (in_flight.empty()) return 0.0;
  const std::set<int> full = flows.all_terminals();
  std::size_t hits = 0;
  for (const Packet& p : in_flight)
    if (terminal_set(p, flows) == full) ++hits;
  return static_cast<double>(hits) / static_cast<double>(in_flight.size());
}

std::string log_line(const Packet& p) {
  std::uint64_t digest = 0xcbf29ce484222325ull;  // FNV-1a over payload symbols
  for (const GfElement& e : p.payload) {
    digest ^= static_cast<std::uint64_t>(e.value & 0xff);
    digest *= 0x100000001b3ull;
    digest ^= static_cast<std::uint64_t>(e.value >> 8);
    digest *= 0x100000001b3ull;
  }
  std::string out = std::to_string(p.stamp);
  out += ' ';
  char buf[8];
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%02x", p.coeffs[i].value);
    if (i) out += ':';
    out += buf;
  }
  char tail[24];
  std::snprintf(tail, sizeof tail, " %016llx",
                static_cast<unsigned long long>(digest));
  out += tail;
  return out;
}

}  // namespace netform::rlnc
