#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "psgraph/errors.hpp"
#include "psgraph/graph.hpp"

namespace psgraph {

// How raw timestamps map onto snapshot indices. bucket_width == 0 means one
// snapshot per distinct raw value (the default); > 0 buckets raw values into
// fixed-width windows starting at the smallest raw value.
struct WindowRule {
  long long bucket_width = 0;
};

namespace detail {

struct TemporalRecord {
  long long u = 0;
  long long v = 0;
  long long t = 0;
};

inline bool parse_int(std::string_view token, long long& out) {
  if (token.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (token[0] == '-') {
    neg = true;
    i = 1;
    if (token.size() == 1) return false;
  }
  long long value = 0;
  for (; i < token.size(); ++i) {
    char c = token[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = neg ? -value : value;
  return true;
}

// Splits a line into whitespace-separated tokens.
inline std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r'))
      ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r')
      ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

// Builds a GraphStream from records whose t field is already a snapshot
// index in 1..T. Node ids are remapped to a dense range: nodes are grouped
// by the first snapshot in which they are mentioned, and ordered by external
// id within each group. This ordering is a fixed point of serialize/parse,
// which gives the round-trip property.
inline GraphStream assemble(std::vector<TemporalRecord>& records,
                            int num_snapshots) {
  std::map<long long, int> first_seen;  // external id -> snapshot index
  for (const auto& r : records) {
    for (long long id : {r.u, r.v}) {
      auto [it, inserted] = first_seen.try_emplace(id, static_cast<int>(r.t));
      if (!inserted && static_cast<int>(r.t) < it->second)
        it->second = static_cast<int>(r.t);
    }
  }

  std::vector<std::pair<int, long long>> order;  // (cohort, external id)
  order.reserve(first_seen.size());
  for (const auto& [id, snap] : first_seen) order.emplace_back(snap, id);
  std::sort(order.begin(), order.end());

  std::map<long long, NodeId> remap;
  std::vector<NodeId> universe_size(num_snapshots + 1, 0);
  for (NodeId dense = 0; dense < order.size(); ++dense)
    remap[order[dense].second] = dense;
  for (const auto& [snap, id] : order)
    for (int s = snap; s <= num_snapshots; ++s) ++universe_size[s];

  std::vector<std::vector<Edge>> per_snapshot(num_snapshots);
  for (const auto& r : records) {
    if (r.u == r.v) continue;  // mention only, no edge
    NodeId a = remap[r.u];
    NodeId b = remap[r.v];
    per_snapshot[r.t - 1].emplace_back(a, b);
  }

  GraphStream stream;
  stream.snapshots.reserve(num_snapshots);
  for (int t = 1; t <= num_snapshots; ++t)
    stream.snapshots.push_back(
        make_snapshot(t, universe_size[t], std::move(per_snapshot[t - 1])));
  return stream;
}

}  // namespace detail

// Parses format A: one "u v t" line per edge, '#' comment lines ignored.
// Self-loop lines contribute the node to the universe but no edge. Raw
// timestamps are mapped to snapshot indices by the window rule; the node
// set of each snapshot is cumulative (every node mentioned at or before it).
inline GraphStream parse_temporal_edges(std::string_view text,
                                        WindowRule rule = {}) {
  std::vector<detail::TemporalRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    auto tokens = detail::tokenize(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens.size() != 3)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'u v t', got " +
                       std::to_string(tokens.size()) + " tokens");
    detail::TemporalRecord r;
    if (!detail::parse_int(tokens[0], r.u) ||
        !detail::parse_int(tokens[1], r.v) ||
        !detail::parse_int(tokens[2], r.t))
      throw ParseError("line " + std::to_string(line_no) +
                       ": non-integer token");
    if (r.u < 0 || r.v < 0)
      throw ParseError("line " + std::to_string(line_no) +
                       ": negative node id");
    records.push_back(r);
  }
  if (records.empty()) throw ParseError("empty input: no edge records");

  long long t_min = records[0].t;
  long long t_max = records[0].t;
  for (const auto& r : records) {
    t_min = std::min(t_min, r.t);
    t_max = std::max(t_max, r.t);
  }

  int num_snapshots = 0;
  if (rule.bucket_width <= 0) {
    std::map<long long, int> index_of;
    for (const auto& r : records) index_of.emplace(r.t, 0);
    for (auto& [raw, idx] : index_of) idx = ++num_snapshots;
    for (auto& r : records) r.t = index_of.at(r.t);
  } else {
    for (auto& r : records) r.t = (r.t - t_min) / rule.bucket_width + 1;
    num_snapshots = static_cast<int>((t_max - t_min) / rule.bucket_width + 1);
  }
  return detail::assemble(records, num_snapshots);
}

// Parses format B: an ordered list of per-snapshot texts, each "u v" lines.
inline GraphStream parse_snapshot_texts(
    const std::vector<std::string>& texts) {
  if (texts.empty()) throw ParseError("empty input: no snapshot files");
  std::vector<detail::TemporalRecord> records;
  for (std::size_t snap = 0; snap < texts.size(); ++snap) {
    std::string_view text = texts[snap];
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string_view line = text.substr(
          pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
      pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
      ++line_no;

      auto tokens = detail::tokenize(line);
      if (tokens.empty() || tokens[0][0] == '#') continue;
      if (tokens.size() != 2)
        throw ParseError("snapshot " + std::to_string(snap + 1) + " line " +
                         std::to_string(line_no) + ": expected 'u v'");
      detail::TemporalRecord r;
      if (!detail::parse_int(tokens[0], r.u) ||
          !detail::parse_int(tokens[1], r.v))
        throw ParseError("snapshot " + std::to_string(snap + 1) + " line " +
                         std::to_string(line_no) + ": non-integer token");
      if (r.u < 0 || r.v < 0)
        throw ParseError("snapshot " + std::to_string(snap + 1) + " line " +
                         std::to_string(line_no) + ": negative node id");
      r.t = static_cast<long long>(snap + 1);
      records.push_back(r);
    }
  }
  if (records.empty()) throw ParseError("empty input: no edge records");
  return detail::assemble(records, static_cast<int>(texts.size()));
}

// Serializes to format A with the snapshot index as t. A node that enters
// the universe at a snapshot where it has no edge is written as a self-loop
// mention so that parsing the output reproduces the stream exactly.
inline std::string serialize_temporal(const GraphStream& stream) {
  std::string out;
  NodeId prev_universe = 0;
  for (const auto& s : stream.snapshots) {
    std::vector<bool> touched(s.num_nodes, false);
    for (const auto& [u, v] : s.edges) {
      out += std::to_string(u);
      out += ' ';
      out += std::to_string(v);
      out += ' ';
      out += std::to_string(s.timestamp);
      out += '\n';
      touched[u] = true;
      touched[v] = true;
    }
    for (NodeId n = prev_universe; n < s.num_nodes; ++n) {
      if (touched[n]) continue;
      out += std::to_string(n);
      out += ' ';
      out += std::to_string(n);
      out += ' ';
      out += std::to_string(s.timestamp);
      out += '\n';
    }
    prev_universe = s.num_nodes;
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return ss.str();
}

// Loads format B from a manifest file: one snapshot-file path per line
// ('#' comments allowed), relative paths resolved against the manifest
// directory.
inline GraphStream parse_snapshot_manifest(const std::string& manifest_path) {
  std::string manifest = read_file(manifest_path);
  std::string dir;
  if (auto slash = manifest_path.find_last_of('/');
      slash != std::string::npos)
    dir = manifest_path.substr(0, slash + 1);

  std::vector<std::string> texts;
  std::istringstream lines(manifest);
  std::string line;
  while (std::getline(lines, line)) {
    auto tokens = detail::tokenize(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    std::string path(tokens[0]);
    if (!path.empty() && path[0] != '/') path = dir + path;
    texts.push_back(read_file(path));
  }
  return parse_snapshot_texts(texts);
}

}  // namespace psgraph
