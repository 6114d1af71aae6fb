#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ils/csd.hpp"
#include "ils/errors.hpp"
#include "ils/learning.hpp"
#include "ils/retrieval.hpp"
#include "ils/tensor.hpp"

namespace ils {

inline constexpr std::string_view kIltHeader = "ILT v1";
inline constexpr std::string_view kIlcHeader = "ILC v1";

namespace detail {

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

inline std::string escape_quoted(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

/// Cursor over one line. Tokens are separated by exactly one space; quoted
/// strings use backslash escapes for '"' and '\'.
class LineScanner {
 public:
  LineScanner(std::string_view line, std::size_t lineno)
      : line_(line), lineno_(lineno) {}

  bool at_end() const { return pos_ == line_.size(); }

  std::string token() {
    const std::size_t start = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ') ++pos_;
    if (pos_ == start) fail("expected a token");
    return std::string(line_.substr(start, pos_ - start));
  }

  void space() {
    if (pos_ >= line_.size() || line_[pos_] != ' ') {
      fail("expected a single space");
    }
    ++pos_;
    if (pos_ < line_.size() && line_[pos_] == ' ') {
      fail("tokens must be separated by a single space");
    }
  }

  void end_of_line() {
    if (!at_end()) fail("unexpected trailing content");
  }

  std::string quoted() {
    if (pos_ >= line_.size() || line_[pos_] != '"') {
      fail("expected a quoted string");
    }
    ++pos_;
    std::string out;
    while (pos_ < line_.size()) {
      const char c = line_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= line_.size() ||
            (line_[pos_] != '"' && line_[pos_] != '\\')) {
          fail("bad escape in quoted string (only \\\" and \\\\ allowed)");
        }
        out += line_[pos_++];
        continue;
      }
      out += c;
    }
    fail("unterminated quoted string");
    return out;  // unreachable
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw IlsError::parse(lineno_, reason);
  }

 private:
  std::string_view line_;
  std::size_t lineno_;
  std::size_t pos_ = 0;
};

/// Plain decimal literal (digits and at most one dot, no sign or exponent).
inline double parse_weight(std::string_view text, std::size_t lineno) {
  bool dot_seen = false;
  bool digit_seen = false;
  for (char c : text) {
    if (c == '.') {
      if (dot_seen) throw IlsError::parse(lineno, "malformed weight literal");
      dot_seen = true;
    } else if (c >= '0' && c <= '9') {
      digit_seen = true;
    } else {
      throw IlsError::parse(lineno, "malformed weight literal");
    }
  }
  if (!digit_seen) throw IlsError::parse(lineno, "malformed weight literal");
  double value = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), value);
  if (!(value > 0.0) || !(value <= 1.0)) {
    throw IlsError::parse(lineno, "weight must lie in (0,1]");
  }
  return value;
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

inline bool is_comment(std::string_view line) {
  return !line.empty() && line.front() == '#';
}

/// Splits into lines, tolerating a trailing '\r' per line.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

/// Checks the mandatory header line; returns the index of the line after it.
inline std::size_t expect_header(const std::vector<std::string_view>& lines,
                                 std::string_view header) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i]) || is_comment(lines[i])) continue;
    if (lines[i] != header) {
      throw IlsError::parse(i + 1, "expected '" + std::string(header) +
                                       "' header");
    }
    return i + 1;
  }
  throw IlsError::parse(lines.size() + 1,
                        "missing '" + std::string(header) + "' header");
}

}  // namespace detail

/// Grammar-level view of one `thread ... end` block, before validation.
struct RawThreadBlock {
  struct RawConcept {
    std::string id;
    std::string label;
  };
  struct RawStrand {
    std::string label;
    double weight = 0.5;
  };
  struct RawLink {
    std::string a;
    std::string b;
    std::vector<RawStrand> strands;
  };

  std::string id;
  std::size_t line = 0;  // line of the `thread` keyword
  std::vector<RawConcept> concepts;
  std::vector<std::string> akus;
  std::vector<RawLink> links;
};

/// Grammar pass over an ILT file. Throws ParseError only; block-level
/// semantic problems (missing AKUs, self-loops, ...) are left for
/// validate_block so callers can report per-block verdicts.
inline std::vector<RawThreadBlock> parse_thread_blocks(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t index = detail::expect_header(lines, kIltHeader);

  std::vector<RawThreadBlock> blocks;
  RawThreadBlock* open = nullptr;
  for (; index < lines.size(); ++index) {
    const std::string_view line = lines[index];
    const std::size_t lineno = index + 1;
    if (detail::is_blank(line) || detail::is_comment(line)) continue;

    detail::LineScanner scan(line, lineno);
    const std::string keyword = scan.token();
    if (keyword == "thread") {
      if (open) scan.fail("'thread' inside an open block (missing 'end'?)");
      scan.space();
      RawThreadBlock block;
      block.id = scan.token();
      block.line = lineno;
      scan.end_of_line();
      if (!is_valid_id_token(block.id)) scan.fail("invalid thread id");
      for (const RawThreadBlock& existing : blocks) {
        if (existing.id == block.id) scan.fail("duplicate thread id");
      }
      blocks.push_back(std::move(block));
      open = &blocks.back();
      continue;
    }
    if (keyword == "end") {
      scan.end_of_line();
      if (!open) scan.fail("'end' outside a thread block");
      open = nullptr;
      continue;
    }
    if (!open) scan.fail("'" + keyword + "' outside a thread block");
    if (keyword == "concept") {
      scan.space();
      RawThreadBlock::RawConcept entry;
      entry.id = scan.token();
      scan.space();
      entry.label = scan.quoted();
      scan.end_of_line();
      if (!is_valid_id_token(entry.id)) scan.fail("invalid concept id");
      open->concepts.push_back(std::move(entry));
    } else if (keyword == "aku") {
      scan.space();
      const std::string id = scan.token();
      scan.end_of_line();
      if (!is_valid_id_token(id)) scan.fail("invalid concept id");
      open->akus.push_back(id);
    } else if (keyword == "link") {
      scan.space();
      RawThreadBlock::RawLink link;
      link.a = scan.token();
      scan.space();
      link.b = scan.token();
      if (!is_valid_id_token(link.a) || !is_valid_id_token(link.b)) {
        scan.fail("invalid concept id");
      }
      if (!scan.at_end()) {
        scan.space();
        const std::string spec = scan.token();
        scan.end_of_line();
        constexpr std::string_view prefix = "strands=";
        if (spec.rfind(prefix, 0) != 0) {
          scan.fail("expected 'strands=<label>:<w>[;...]'");
        }
        std::string_view body(spec);
        body.remove_prefix(prefix.size());
        while (true) {
          const std::size_t semi = body.find(';');
          const std::string_view item = body.substr(0, semi);
          const std::size_t colon = item.find(':');
          if (colon == std::string_view::npos || colon == 0) {
            scan.fail("malformed strand (want <label>:<weight>)");
          }
          RawThreadBlock::RawStrand strand;
          strand.label = std::string(item.substr(0, colon));
          strand.weight =
              detail::parse_weight(item.substr(colon + 1), lineno);
          link.strands.push_back(std::move(strand));
          if (semi == std::string_view::npos) break;
          body.remove_prefix(semi + 1);
        }
      } else {
        link.strands.push_back(RawThreadBlock::RawStrand{"rel", 0.5});
      }
      open->links.push_back(std::move(link));
    } else {
      scan.fail("unknown keyword '" + keyword + "'");
    }
  }
  if (open) {
    throw IlsError::parse(open->line, "thread block without 'end'");
  }
  return blocks;
}

/// Semantic pass: turns one raw block into a validated thread. Errors keep
/// their codes (NoAku, NoSku, Disconnected, ...) with the block id prefixed
/// to the message.
inline Csd validate_block(const RawThreadBlock& block,
                          double decay = kDefaultDecay) {
  try {
    std::vector<Concept> concepts;
    concepts.reserve(block.concepts.size());
    for (const auto& raw : block.concepts) {
      concepts.emplace_back(ConceptId(raw.id), raw.label);
    }
    std::vector<StrandedLink> links;
    links.reserve(block.links.size());
    for (const auto& raw : block.links) {
      std::vector<Strand> strands;
      strands.reserve(raw.strands.size());
      for (const auto& s : raw.strands) {
        strands.push_back(Strand{s.label, s.weight});
      }
      links.emplace_back(ConceptId(raw.a), ConceptId(raw.b),
                         std::move(strands));
    }
    std::vector<ConceptId> akus;
    akus.reserve(block.akus.size());
    for (const std::string& id : block.akus) akus.emplace_back(id);
    return Csd::build(block.id, std::move(concepts), std::move(links),
                      std::move(akus), decay);
  } catch (const IlsError& err) {
    throw IlsError(err.code(),
                   "thread '" + block.id + "': " + err.message());
  }
}

/// Parses and validates a whole ILT file. ParseError for grammar trouble;
/// the first invalid block otherwise aborts with its validation error.
inline std::vector<Csd> parse_thread_file(std::string_view text,
                                          double decay = kDefaultDecay) {
  std::vector<Csd> threads;
  for (const RawThreadBlock& block : parse_thread_blocks(text)) {
    threads.push_back(validate_block(block, decay));
  }
  return threads;
}

/// Parses an ILC constraint file.
inline ConstraintSet parse_constraint_file(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t index = detail::expect_header(lines, kIlcHeader);
  ConstraintSet constraints;
  for (; index < lines.size(); ++index) {
    const std::string_view line = lines[index];
    const std::size_t lineno = index + 1;
    if (detail::is_blank(line) || detail::is_comment(line)) continue;
    detail::LineScanner scan(line, lineno);
    const std::string keyword = scan.token();
    if (keyword != "incompatible") {
      scan.fail("unknown keyword '" + keyword + "'");
    }
    scan.space();
    const std::string a = scan.quoted();
    scan.space();
    const std::string b = scan.quoted();
    scan.end_of_line();
    try {
      constraints.add_incompatible(a, b);
    } catch (const IlsError& err) {
      scan.fail(err.message());
    }
  }
  return constraints;
}

namespace detail {

inline void serialize_block(const Csd& thread, std::string& out) {
  out += "thread " + thread.id() + "\n";
  for (const Concept& node : thread.concepts()) {
    out += "concept " + node.id().str() + " \"" +
           escape_quoted(node.label()) + "\"\n";
  }
  for (const ConceptId& aku : thread.akus()) {
    out += "aku " + aku.str() + "\n";
  }
  for (const StrandedLink& link : thread.links()) {
    out += "link " + link.first().str() + " " + link.second().str() +
           " strands=";
    bool first = true;
    for (const Strand& strand : link.strands()) {
      if (!first) out += ';';
      first = false;
      out += strand.property_label + ":" + format_fixed(strand.weight, 6);
    }
    out += "\n";
  }
  out += "end\n";
}

}  // namespace detail

/// Canonical ILT text: concepts, akus, and links in sorted order, strand
/// weights at six decimals. parse(serialize(x)) preserves canonical_form.
inline std::string serialize(std::span<const Csd> threads) {
  std::string out(kIltHeader);
  out += "\n";
  for (const Csd& thread : threads) {
    out += "\n";
    detail::serialize_block(thread, out);
  }
  return out;
}

inline std::string serialize(const Csd& thread) {
  return serialize(std::span<const Csd>(&thread, 1));
}

/// Deterministic DOT rendering of one thread: nodes labeled "<id>\n<label>"
/// with AKUs doubled, edge pen width 1 + 4*affinity at two decimals.
inline std::string export_dot(const Csd& thread) {
  std::string out = "graph \"" + thread.id() + "\" {\n";
  out += "  node [shape=ellipse];\n";
  for (const Concept& node : thread.concepts()) {
    out += "  \"" + node.id().str() + "\" [label=\"" +
           detail::escape_quoted(node.id().str()) + "\\n" +
           detail::escape_quoted(node.label()) + "\"";
    if (thread.is_aku(node.id())) out += ", peripheries=2";
    out += "];\n";
  }
  for (const StrandedLink& link : thread.links()) {
    out += "  \"" + link.first().str() + "\" -- \"" + link.second().str() +
           "\" [penwidth=" +
           detail::format_fixed(1.0 + 4.0 * link_affinity(link), 2) + "];\n";
  }
  out += "}\n";
  return out;
}

/// Deterministic DOT rendering of a product cluster. Pair vertices are
/// named "<left>,<right>"; coherent ones are doubled; edge pen width scales
/// with the product edge weight.
inline std::string export_dot(const ProductCluster& cluster) {
  const auto [left_id, right_id] = cluster.factor_ids();
  std::string out = "graph \"" + left_id + "x" + right_id + "\" {\n";
  out += "  node [shape=ellipse];\n";
  auto name = [](const PairVertex& v) {
    return v.left.str() + "," + v.right.str();
  };
  for (const PairVertex& vertex : cluster.vertices()) {
    out += "  \"" + name(vertex) + "\" [label=\"" + name(vertex) + "\"";
    if (vertex.coherent()) out += ", peripheries=2";
    out += "];\n";
  }
  for (const ProductCluster::Edge& edge : cluster.edges()) {
    out += "  \"" + name(edge.a) + "\" -- \"" + name(edge.b) +
           "\" [penwidth=" +
           detail::format_fixed(1.0 + 4.0 * edge.weight, 2) + "];\n";
  }
  out += "}\n";
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IlsError(ErrorCode::io_error,
                   "cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IlsError(ErrorCode::io_error,
                   "cannot open '" + path.string() + "' for writing");
  }
  out << content;
  if (!out) {
    throw IlsError(ErrorCode::io_error, "failed writing '" + path.string() + "'");
  }
}

/// Loads every thread from an .ilt file, or from all .ilt files (sorted by
/// filename) when `path` is a directory.
inline ThreadStore load_store(const std::filesystem::path& path,
                              double decay = kDefaultDecay) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ilt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw IlsError(ErrorCode::io_error, "no such file or directory: '" +
                                            path.string() + "'");
  }
  ThreadStore store;
  for (const fs::path& file : files) {
    for (Csd& thread : parse_thread_file(read_file(file), decay)) {
      store.add_thread(std::move(thread));
    }
  }
  return store;
}

}  // namespace ils
