#include "xsdp/formats.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_set>

namespace xsdp {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

// getline that strips a trailing '\r'.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::string cell_in(std::string_view s) { return s == "_" ? std::string() : std::string(s); }
std::string_view cell_out(const std::string& s) { return s.empty() ? std::string_view("_") : s; }

bool has_control(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

struct RawLine {
  int number;
  std::string text;
};

// Splits the stream into blank-line separated blocks.
std::vector<std::vector<RawLine>> read_blocks(std::istream& in) {
  std::vector<std::vector<RawLine>> blocks;
  std::vector<RawLine> cur;
  std::string line;
  int number = 0;
  while (next_line(in, line)) {
    ++number;
    if (line.empty()) {
      if (!cur.empty()) blocks.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur.push_back({number, line});
  }
  if (!cur.empty()) blocks.push_back(std::move(cur));
  return blocks;
}

constexpr std::string_view kAlignedPrefix = "#aligned:";

}  // namespace

// ---- SDP ---------------------------------------------------------------------

PartialGraph SdpSentence::partial() const {
  if (!aligned) return PartialGraph::full(graph);
  return PartialGraph(graph, *aligned);
}

SdpSentence SdpSentence::from_partial(std::string id, const PartialGraph& p) {
  SdpSentence s;
  s.id = std::move(id);
  s.graph = p.graph;
  s.aligned = p.aligned;
  return s;
}

SdpDocument read_sdp(std::istream& in) {
  SdpDocument doc;
  std::unordered_set<std::string> ids;
  auto blocks = read_blocks(in);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& block = blocks[b];
    std::size_t row = 0;
    if (b == 0 && block[0].number == 1 && block[0].text.rfind("#SDP", 0) == 0) ++row;
    if (row == block.size()) continue;

    SdpSentence sent;
    if (block[row].text.empty() || block[row].text[0] != '#' ||
        block[row].text.rfind(kAlignedPrefix, 0) == 0)
      throw ParseError(block[row].number, "expected '#<id>' sentence header");
    sent.id = block[row].text.substr(1);
    if (!ids.insert(sent.id).second)
      throw ParseError(block[row].number, "duplicate sentence id '" + sent.id + "'");
    const int header_line = block[row].number;
    ++row;
    if (row < block.size() && block[row].text.rfind(kAlignedPrefix, 0) == 0) {
      std::vector<int> aligned;
      for (auto f : split_ws(std::string_view(block[row].text).substr(kAlignedPrefix.size()))) {
        int v;
        if (!parse_int(f, v) || v < 0)
          throw ParseError(block[row].number, "bad aligned index '" + std::string(f) + "'");
        aligned.push_back(v);
      }
      sent.aligned = std::move(aligned);
      ++row;
    }

    std::vector<std::vector<std::string_view>> cols;
    std::vector<int> line_no;
    std::vector<int> preds;
    for (; row < block.size(); ++row) {
      const auto& raw = block[row];
      if (!raw.text.empty() && raw.text[0] == '#')
        throw ParseError(raw.number, "unexpected comment inside sentence block");
      auto c = split(raw.text, '\t');
      if (c.size() < 7)
        throw ParseError(raw.number, "expected at least 7 columns, found " + std::to_string(c.size()));
      int id;
      const int expected = static_cast<int>(cols.size()) + 1;
      if (!parse_int(c[0], id) || id != expected)
        throw ParseError(raw.number, "token id '" + std::string(c[0]) + "' is not " +
                                         std::to_string(expected) + " (ids must be contiguous)");
      if ((c[4] != "+" && c[4] != "-") || (c[5] != "+" && c[5] != "-"))
        throw ParseError(raw.number, "TOP and PRED columns must be '+' or '-'");
      if (c[5] == "+") preds.push_back(id);
      Token t;
      t.index = id;
      t.form = std::string(c[1]);
      t.lemma = cell_in(c[2]);
      t.pos = cell_in(c[3]);
      t.frame = cell_in(c[6]);
      sent.graph.tokens.push_back(std::move(t));
      cols.push_back(std::move(c));
      line_no.push_back(raw.number);
    }
    if (cols.empty()) throw ParseError(header_line, "sentence '" + sent.id + "' has no tokens");

    for (std::size_t r = 0; r < cols.size(); ++r) {
      const auto& c = cols[r];
      const int dep = static_cast<int>(r) + 1;
      if (c.size() > 7 + preds.size())
        throw ParseError(line_no[r], "argument column " + std::to_string(preds.size() + 1) +
                                         " references a non-predicate (" +
                                         std::to_string(preds.size()) + " predicates)");
      if (c.size() < 7 + preds.size())
        throw ParseError(line_no[r], "expected " + std::to_string(7 + preds.size()) +
                                         " columns, found " + std::to_string(c.size()));
      if (c[4] == "+") sent.graph.add_top(dep);
      for (std::size_t a = 0; a < preds.size(); ++a) {
        auto cell = c[7 + a];
        if (cell == "_") continue;
        if (preds[a] == dep) throw ParseError(line_no[r], "self-loop on token " + std::to_string(dep));
        sent.graph.add_edge(preds[a], dep, std::string(cell));
      }
    }
    if (sent.aligned) {
      try {
        PartialGraph check(sent.graph, *sent.aligned);
        sent.aligned = check.aligned;
      } catch (const std::invalid_argument& e) {
        throw ParseError(header_line, e.what());
      }
    }
    doc.push_back(std::move(sent));
  }
  return doc;
}

void write_sdp(std::ostream& out, const SdpDocument& doc) {
  std::unordered_set<std::string> ids;
  for (const auto& s : doc) {
    if (s.id.empty() || has_control(s.id)) throw std::invalid_argument("invalid sentence id '" + s.id + "'");
    if (!ids.insert(s.id).second) throw std::invalid_argument("duplicate sentence id '" + s.id + "'");
    const auto& g = s.graph;
    const int n = g.size();
    if (n == 0) throw std::invalid_argument("sentence '" + s.id + "' has no tokens");

    std::vector<char> is_top(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> preds;
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      const Edge& e = g.edges[k];
      if (e.head < 0 || e.head > n || e.dep < 1 || e.dep > n || e.head == e.dep)
        throw std::invalid_argument("sentence '" + s.id + "': invalid edge");
      if (k > 0 && g.edges[k - 1].head == e.head && g.edges[k - 1].dep == e.dep)
        throw std::invalid_argument("sentence '" + s.id + "': two labels on one cell");
      if (e.label.empty() || e.label == "_" || has_control(e.label))
        throw std::invalid_argument("sentence '" + s.id + "': label '" + e.label +
                                    "' cannot be written (empty, '_' or contains tab/newline)");
      if (e.head == 0) {
        if (e.label != kTopLabel)
          throw std::invalid_argument("sentence '" + s.id + "': root edge with label '" + e.label + "'");
        is_top[static_cast<std::size_t>(e.dep)] = 1;
      } else if (preds.empty() || preds.back() != e.head) {
        preds.push_back(e.head);  // edges are sorted by head
      }
    }

    out << '#' << s.id << '\n';
    if (s.aligned) {
      PartialGraph check(g, *s.aligned);  // validates the mask
      out << kAlignedPrefix;
      for (int a : check.aligned) out << ' ' << a;
      out << '\n';
    }
    for (int j = 1; j <= n; ++j) {
      const Token& t = g.tokens[static_cast<std::size_t>(j - 1)];
      if (has_control(t.form) || has_control(t.lemma) || has_control(t.pos) || has_control(t.frame))
        throw std::invalid_argument("sentence '" + s.id + "': token field contains tab/newline");
      out << j << '\t' << t.form << '\t' << cell_out(t.lemma) << '\t' << cell_out(t.pos) << '\t'
          << (is_top[static_cast<std::size_t>(j)] ? '+' : '-') << '\t'
          << (std::binary_search(preds.begin(), preds.end(), j) ? '+' : '-') << '\t'
          << cell_out(t.frame);
      for (int p : preds) {
        const std::string* l = g.find(p, j);
        out << '\t' << (l ? std::string_view(*l) : std::string_view("_"));
      }
      out << '\n';
    }
    out << '\n';
  }
}

std::string write_sdp(const SdpDocument& doc) {
  std::ostringstream os;
  write_sdp(os, doc);
  return os.str();
}

// ---- CoNLL-U -------------------------------------------------------------------

std::vector<ConlluTree> read_conllu_full(std::istream& in) {
  std::vector<ConlluTree> trees;
  for (auto& block : read_blocks(in)) {
    ConlluTree ct;
    std::vector<int> line_no;
    for (const auto& raw : block) {
      if (raw.text[0] == '#') {
        if (!ct.tree.tokens.empty()) throw ParseError(raw.number, "comment inside token lines");
        ct.tree.comments.push_back(raw.text);
        continue;
      }
      auto c = split(raw.text, '\t');
      if (c.size() != 10)
        throw ParseError(raw.number, "expected 10 columns, found " + std::to_string(c.size()));
      if (c[0].find_first_of("-.") != std::string_view::npos) continue;
      int id;
      const int expected = ct.tree.size() + 1;
      if (!parse_int(c[0], id) || id != expected)
        throw ParseError(raw.number, "token id '" + std::string(c[0]) + "' is not " + std::to_string(expected));
      int head;
      if (!parse_int(c[6], head) || head < 0)
        throw ParseError(raw.number, "bad HEAD '" + std::string(c[6]) + "'");
      Token t;
      t.index = id;
      t.form = std::string(c[1]);
      t.lemma = cell_in(c[2]);
      t.pos = cell_in(c[3]);
      ct.tree.tokens.push_back(std::move(t));
      ct.tree.heads.push_back(head);
      ct.tree.deprels.push_back(cell_in(c[7]));
      ct.extras.push_back({std::string(c[4]), std::string(c[5]), std::string(c[8]), std::string(c[9])});
      line_no.push_back(raw.number);
    }
    if (ct.tree.tokens.empty())
      throw ParseError(block.front().number, "sentence without tokens");
    const int n = ct.tree.size();
    for (int j = 1; j <= n; ++j) {
      if (ct.tree.head(j) > n)
        throw ParseError(line_no[static_cast<std::size_t>(j - 1)],
                         "HEAD " + std::to_string(ct.tree.head(j)) + " out of range for " +
                             std::to_string(n) + " tokens");
    }
    trees.push_back(std::move(ct));
  }
  return trees;
}

std::vector<SyntacticTree> read_conllu(std::istream& in) {
  std::vector<SyntacticTree> out;
  for (auto& ct : read_conllu_full(in)) out.push_back(std::move(ct.tree));
  return out;
}

void write_conllu(std::ostream& out, const std::vector<ConlluTree>& trees) {
  for (const auto& ct : trees) {
    const auto& t = ct.tree;
    if (t.heads.size() != t.tokens.size() || t.deprels.size() != t.tokens.size())
      throw std::invalid_argument("tree arrays disagree in length");
    for (const auto& c : t.comments) {
      if (c.empty() || c[0] != '#' || has_control(c))
        throw std::invalid_argument("comment lines must start with '#'");
      out << c << '\n';
    }
    for (int j = 1; j <= t.size(); ++j) {
      const Token& tok = t.tokens[static_cast<std::size_t>(j - 1)];
      const std::size_t k = static_cast<std::size_t>(j - 1);
      static const std::array<std::string, 4> kEmpty = {"_", "_", "_", "_"};
      const auto& ex = k < ct.extras.size() ? ct.extras[k] : kEmpty;
      if (has_control(tok.form) || has_control(tok.lemma) || has_control(tok.pos) ||
          has_control(t.deprels[k]))
        throw std::invalid_argument("token field contains tab/newline");
      out << j << '\t' << tok.form << '\t' << cell_out(tok.lemma) << '\t' << cell_out(tok.pos) << '\t'
          << ex[0] << '\t' << ex[1] << '\t' << t.heads[k] << '\t' << cell_out(t.deprels[k]) << '\t'
          << ex[2] << '\t' << ex[3] << '\n';
    }
    out << '\n';
  }
}

void write_conllu(std::ostream& out, const std::vector<SyntacticTree>& trees) {
  std::vector<ConlluTree> wrapped;
  wrapped.reserve(trees.size());
  for (const auto& t : trees) wrapped.push_back({t, {}});
  write_conllu(out, wrapped);
}

// ---- Alignments ------------------------------------------------------------------

AlignmentFile read_alignments(std::istream& in) {
  AlignmentFile file;
  std::string line;
  int number = 0;
  while (next_line(in, line)) {
    ++number;
    AlignmentSet links;
    for (auto f : split_ws(line)) {
      auto dash = f.find('-');
      int s, t;
      if (dash == std::string_view::npos || !parse_int(f.substr(0, dash), s) ||
          !parse_int(f.substr(dash + 1), t) || s < 0 || t < 0)
        throw ParseError(number, "bad alignment link '" + std::string(f) + "'");
      links.emplace(s + 1, t + 1);
    }
    file.push_back(std::move(links));
  }
  return file;
}

std::string format_alignment_line(const AlignmentSet& links) {
  std::string line;
  for (const auto& [s, t] : links) {
    if (s < 1 || t < 1) throw std::invalid_argument("alignment indices are 1-based in memory");
    if (!line.empty()) line += ' ';
    line += std::to_string(s - 1);
    line += '-';
    line += std::to_string(t - 1);
  }
  return line;
}

void write_alignments(std::ostream& out, const AlignmentFile& file) {
  for (const auto& links : file) out << format_alignment_line(links) << '\n';
}

// ---- Context vectors ----------------------------------------------------------------

std::vector<ContextMatrix> read_context_vectors(std::istream& in, int expected_dim,
                                                const std::vector<int>* token_counts) {
  if (expected_dim < 1) throw std::invalid_argument("context dimension must be positive");
  std::vector<ContextMatrix> out;
  for (auto& block : read_blocks(in)) {
    ContextMatrix m(static_cast<Eigen::Index>(block.size()), expected_dim);
    for (std::size_t r = 0; r < block.size(); ++r) {
      auto f = split_ws(block[r].text);
      if (static_cast<int>(f.size()) != expected_dim)
        throw ParseError(block[r].number, "vector has dimension " + std::to_string(f.size()) +
                                              ", expected " + std::to_string(expected_dim));
      for (int c = 0; c < expected_dim; ++c) {
        double v;
        if (!parse_double(f[static_cast<std::size_t>(c)], v))
          throw ParseError(block[r].number, "bad number '" + std::string(f[static_cast<std::size_t>(c)]) + "'");
        m(static_cast<Eigen::Index>(r), c) = v;
      }
    }
    out.push_back(std::move(m));
  }
  if (token_counts) {
    if (token_counts->size() != out.size())
      throw ParseError(0, "context file has " + std::to_string(out.size()) + " sentences, corpus has " +
                              std::to_string(token_counts->size()));
    for (std::size_t s = 0; s < out.size(); ++s) {
      if (out[s].rows() != (*token_counts)[s])
        throw ParseError(0, "sentence " + std::to_string(s + 1) + " has " + std::to_string(out[s].rows()) +
                                " context vectors for " + std::to_string((*token_counts)[s]) + " tokens");
    }
  }
  return out;
}

void write_context_vectors(std::ostream& out, const std::vector<ContextMatrix>& vectors) {
  char buf[64];
  for (std::size_t s = 0; s < vectors.size(); ++s) {
    if (s > 0) out << '\n';
    const auto& m = vectors[s];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), m(r, c));
        (void)ec;
        if (c > 0) out << ' ';
        out.write(buf, p - buf);
      }
      out << '\n';
    }
  }
}

std::vector<Sentence> read_sentences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Sentence> out;
  auto ends_with = [&](std::string_view suf) {
    return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with(".conllu")) {
    for (auto& t : read_conllu(in)) out.push_back(std::move(t.tokens));
  } else if (ends_with(".sdp")) {
    for (auto& s : read_sdp(in)) out.push_back(std::move(s.graph.tokens));
  } else {
    throw std::runtime_error(path + ": expected a .conllu or .sdp file");
  }
  return out;
}

}  // namespace xsdp
