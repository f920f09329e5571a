#include "tgm/csv_loader.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "tgm/error.hpp"

namespace tgm {
namespace {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
bool split_record(std::string_view line, std::vector<std::string>& out) {
  out.clear();
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return !quoted;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {
    if (text_.starts_with("\xEF\xBB\xBF")) text_.remove_prefix(3);
  }

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++number_;
    return true;
  }

  std::size_t number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

[[noreturn]] void bad_field(std::size_t line, std::size_t column, const std::string& what) {
  throw Error(ErrorCode::BadField,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

std::uint64_t parse_id(std::string_view s, std::size_t line, std::size_t column) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    bad_field(line, column, "expected a non-negative integer node id, got '" + std::string(s) + "'");
  }
  return v;
}

double parse_real(std::string_view s, std::size_t line, std::size_t column) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    bad_field(line, column, "expected a finite number, got '" + std::string(s) + "'");
  }
  return v;
}

void append_real(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void append_field(std::string& out, std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    out.append(s);
    return;
  }
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace

LoadResult load_graph(std::string_view edges_csv, std::optional<std::string_view> nodes_csv,
                      const ChannelRegistry& registry) {
  GraphBuilder builder(registry);
  LoadResult result;
  std::vector<std::string> fields;
  std::unordered_set<std::uint64_t> referenced;

  LineReader edges(edges_csv);
  std::string_view line;
  if (!edges.next(line) || line != kEdgesHeader) {
    throw Error(ErrorCode::MissingHeader, "edges CSV must start with '" + std::string(kEdgesHeader) + "'");
  }
  while (edges.next(line)) {
    if (line.empty()) continue;
    const auto ln = edges.number();
    if (!split_record(line, fields)) bad_field(ln, fields.size(), "unterminated quote");
    if (fields.size() != 7) {
      bad_field(ln, std::min<std::size_t>(fields.size() + 1, 8),
                "expected 7 fields, found " + std::to_string(fields.size()));
    }
    const auto source = parse_id(fields[0], ln, 1);
    const auto channel = registry.find(fields[1]);
    if (!channel) {
      throw Error(ErrorCode::UnknownChannel,
                  "line " + std::to_string(ln) + ": unknown channel '" + fields[1] + "'");
    }
    const auto target = parse_id(fields[2], ln, 3);
    const auto time = parse_real(fields[3], ln, 4);
    if (time < 0.0) bad_field(ln, 4, "time must be non-negative");
    const auto weight = parse_real(fields[4], ln, 5);
    builder.add_edge(NodeId{source}, NodeId{target}, *channel, time, weight, fields[5], fields[6]);
    referenced.insert(source);
    referenced.insert(target);
  }

  if (nodes_csv) {
    LineReader nodes(*nodes_csv);
    if (!nodes.next(line) || line != kNodesHeader) {
      throw Error(ErrorCode::MissingHeader, "nodes CSV must start with '" + std::string(kNodesHeader) + "'");
    }
    std::unordered_set<std::uint64_t> seen;
    while (nodes.next(line)) {
      if (line.empty()) continue;
      const auto ln = nodes.number();
      if (!split_record(line, fields)) bad_field(ln, fields.size(), "unterminated quote");
      if (fields.size() < 2 || fields.size() > 3) {
        bad_field(ln, std::min<std::size_t>(fields.size() + 1, 4),
                  "expected 3 fields, found " + std::to_string(fields.size()));
      }
      const auto id = parse_id(fields[0], ln, 1);
      if (!seen.insert(id).second) bad_field(ln, 1, "duplicate node " + std::to_string(id));
      NodeKind kind = NodeKind::Unknown;
      if (fields[1].empty()) {
        if (!referenced.contains(id)) {
          result.warnings.push_back("DanglingNodeRef: line " + std::to_string(ln) + ": node " +
                                    std::to_string(id) + " has no kind and no edges");
        }
      } else if (auto k = parse_node_kind(fields[1])) {
        kind = *k;
      } else {
        bad_field(ln, 2, "unknown node kind '" + fields[1] + "'");
      }
      builder.add_node(NodeId{id}, kind, fields.size() == 3 ? std::move(fields[2]) : std::string{});
    }
  }

  result.graph = std::move(builder).build();
  return result;
}

LoadResult load_graph_files(const std::filesystem::path& edges_csv,
                            const std::optional<std::filesystem::path>& nodes_csv,
                            const ChannelRegistry& registry) {
  const auto edges = read_file(edges_csv);
  if (!nodes_csv) return load_graph(edges, std::nullopt, registry);
  const auto nodes = read_file(*nodes_csv);
  return load_graph(edges, std::string_view{nodes}, registry);
}

std::string write_edges_csv(const TemporalMultigraph& graph) {
  std::string out(kEdgesHeader);
  out.push_back('\n');
  for (const auto& e : graph.edges()) {
    out.append(std::to_string(graph.id_of(e.source).value));
    out.push_back(',');
    out.append(graph.channels().code(e.channel));
    out.push_back(',');
    out.append(std::to_string(graph.id_of(e.target).value));
    out.push_back(',');
    append_real(out, e.time);
    out.push_back(',');
    append_real(out, e.weight);
    out.push_back(',');
    append_field(out, graph.location(e.source_location));
    out.push_back(',');
    append_field(out, graph.location(e.target_location));
    out.push_back('\n');
  }
  return out;
}

std::string write_nodes_csv(const TemporalMultigraph& graph) {
  std::string out(kNodesHeader);
  out.push_back('\n');
  for (const auto& n : graph.nodes()) {
    out.append(std::to_string(n.id.value));
    out.push_back(',');
    out.append(to_string(n.kind));
    out.push_back(',');
    append_field(out, n.label);
    out.push_back('\n');
  }
  return out;
}

}  // namespace tgm
