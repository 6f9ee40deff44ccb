#ifndef XSDP_TESTS_SUPPORT_ORACLES_H_
#define XSDP_TESTS_SUPPORT_ORACLES_H_

// Random instance generators and brute-force reference implementations
// shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "xsdp/evaluation.h"
#include "xsdp/formats.h"
#include "xsdp/graph.h"
#include "xsdp/rng.h"

namespace xsdp::testing {

inline const std::vector<std::string>& sample_labels() {
  static const std::vector<std::string> k = {"ACT-arg", "PAT-arg", "RSTR", "APP", "TWHEN", "CONJ.member"};
  return k;
}

// Printable field without tabs/newlines; may contain UTF-8 and spaces.
inline std::string random_field(Rng& rng, bool allow_space = false) {
  static const std::vector<std::string> pieces = {"a", "b", "k", "Z", "7", "-", ".", "ř", "é", "ů", "'", ","};
  std::string s;
  const int len = rng.range(1, 6);
  for (int i = 0; i < len; ++i) {
    if (allow_space && i > 0 && i + 1 < len && rng.bernoulli(0.1))
      s += ' ';
    else
      s += pieces[rng.index(pieces.size())];
  }
  return s;
}

inline Sentence random_sentence(Rng& rng, int n) {
  Sentence s;
  for (int i = 1; i <= n; ++i) {
    Token t;
    t.index = i;
    t.form = random_field(rng);
    t.lemma = rng.bernoulli(0.2) ? "" : random_field(rng);
    t.pos = rng.bernoulli(0.1) ? "" : random_field(rng);
    t.frame = rng.bernoulli(0.7) ? "" : random_field(rng);
    s.push_back(std::move(t));
  }
  return s;
}

// Any subset of off-diagonal cells, one label each; tops drawn separately.
inline SemanticGraph random_graph(Rng& rng, const Sentence& s, double p_edge, double p_top) {
  const int n = static_cast<int>(s.size());
  SemanticGraph g(s);
  for (int d = 1; d <= n; ++d) {
    if (rng.bernoulli(p_top)) g.add_top(d);
    for (int h = 1; h <= n; ++h)
      if (h != d && rng.bernoulli(p_edge)) g.add_edge(h, d, sample_labels()[rng.index(sample_labels().size())]);
  }
  return g;
}

inline AlignmentSet random_links(Rng& rng, int m, int n, double p) {
  AlignmentSet a;
  for (int s = 1; s <= m; ++s)
    for (int t = 1; t <= n; ++t)
      if (rng.bernoulli(p)) a.emplace(s, t);
  return a;
}

// forward ∩ backward, then drop links sharing an endpoint with another survivor.
inline AlignmentSet oracle_intersect(const AlignmentSet& fwd, const AlignmentSet& bwd) {
  std::vector<std::pair<int, int>> both;
  for (const auto& l : fwd)
    if (bwd.count(l)) both.push_back(l);
  AlignmentSet out;
  for (const auto& l : both) {
    int same_src = 0, same_tgt = 0;
    for (const auto& o : both) {
      same_src += o.first == l.first;
      same_tgt += o.second == l.second;
    }
    if (same_src == 1 && same_tgt == 1) out.insert(l);
  }
  return out;
}

// Enumerates every target cell and every source cell mapping onto it.
struct ProjectionOracle {
  std::map<std::pair<int, int>, std::set<std::string>> cells;
  std::vector<int> aligned;
};

inline ProjectionOracle oracle_project(const SemanticGraph& src, const AlignmentSet& links, int n) {
  const int m = src.size();
  auto maps_to = [&](int s, int t) { return (s == 0 && t == 0) || (s > 0 && t > 0 && links.count({s, t}) > 0); };
  ProjectionOracle o;
  o.aligned.push_back(0);
  for (int t = 1; t <= n; ++t)
    for (int s = 1; s <= m; ++s)
      if (links.count({s, t})) {
        o.aligned.push_back(t);
        break;
      }
  for (int ti = 0; ti <= n; ++ti)
    for (int tj = 1; tj <= n; ++tj)
      for (int si = 0; si <= m; ++si)
        for (int sj = 1; sj <= m; ++sj) {
          if (!maps_to(si, ti) || !maps_to(sj, tj)) continue;
          if (const std::string* l = src.find(si, sj)) o.cells[{ti, tj}].insert(*l);
        }
  return o;
}

struct OracleScore {
  std::int64_t gold = 0, predicted = 0, labeled = 0, unlabeled = 0;
};

// Set intersection over (sentence, head, dep[, label]) tuples.
inline OracleScore oracle_score(const std::vector<SemanticGraph>& pred, const std::vector<SemanticGraph>& gold) {
  std::set<std::tuple<std::size_t, int, int, std::string>> gl, pl;
  std::set<std::tuple<std::size_t, int, int>> gu, pu;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (const auto& e : gold[i].edges) {
      gl.emplace(i, e.head, e.dep, e.label);
      gu.emplace(i, e.head, e.dep);
    }
    for (const auto& e : pred[i].edges) {
      pl.emplace(i, e.head, e.dep, e.label);
      pu.emplace(i, e.head, e.dep);
    }
  }
  OracleScore o;
  o.gold = static_cast<std::int64_t>(gl.size());
  o.predicted = static_cast<std::int64_t>(pl.size());
  for (const auto& t : pl) o.labeled += gl.count(t);
  for (const auto& t : pu) o.unlabeled += gu.count(t);
  return o;
}

inline double oracle_f1(std::int64_t correct, std::int64_t gold, std::int64_t predicted) {
  return gold + predicted == 0 ? 0.0 : 2.0 * static_cast<double>(correct) / static_cast<double>(gold + predicted);
}

// Random tree: each token's head is an earlier-placed token in a random order.
inline SyntacticTree random_tree(Rng& rng, const Sentence& s) {
  const int n = static_cast<int>(s.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  rng.shuffle(order);
  SyntacticTree t;
  t.tokens = s;
  t.heads.assign(static_cast<std::size_t>(n), 0);
  static const std::vector<std::string> rels = {"nsubj", "obj", "amod", "obl", "nmod", "conj", "case"};
  t.deprels.assign(static_cast<std::size_t>(n), "");
  for (int k = 0; k < n; ++k) {
    const int tok = order[static_cast<std::size_t>(k)];
    t.heads[static_cast<std::size_t>(tok - 1)] = k == 0 ? 0 : order[rng.index(static_cast<std::uint64_t>(k))];
    t.deprels[static_cast<std::size_t>(tok - 1)] = k == 0 ? "root" : rels[rng.index(rels.size())];
  }
  return t;
}

inline std::string sdp_text(const SdpDocument& d) { return write_sdp(d); }

inline std::string conllu_text(const std::vector<ConlluTree>& t) {
  std::ostringstream o;
  write_conllu(o, t);
  return o.str();
}

inline std::string alignment_text(const AlignmentFile& f) {
  std::ostringstream o;
  write_alignments(o, f);
  return o.str();
}

inline SdpDocument random_sdp_document(Rng& rng) {
  SdpDocument doc;
  const int count = rng.range(1, 6);
  for (int k = 0; k < count; ++k) {
    SdpSentence s;
    s.id = std::to_string(20000000 + k * 7 + static_cast<int>(rng.index(7)));
    s.graph = random_graph(rng, random_sentence(rng, rng.range(1, 12)), 0.15, 0.2);
    if (rng.bernoulli(0.5)) {
      std::vector<int> a = {0};
      for (int i = 1; i <= s.graph.size(); ++i)
        if (rng.bernoulli(0.7)) a.push_back(i);
      auto off = [&](int i) { return !std::binary_search(a.begin(), a.end(), i); };
      std::erase_if(s.graph.edges, [&](const Edge& e) { return off(e.head) || off(e.dep); });
      s.aligned = a;
    }
    doc.push_back(std::move(s));
  }
  return doc;
}

inline std::vector<ConlluTree> random_conllu_document(Rng& rng) {
  std::vector<ConlluTree> doc;
  const int count = rng.range(1, 6);
  for (int k = 0; k < count; ++k) {
    ConlluTree ct;
    ct.tree = random_tree(rng, random_sentence(rng, rng.range(1, 12)));
    for (auto& t : ct.tree.tokens) t.frame.clear();
    if (rng.bernoulli(0.7)) ct.tree.comments.push_back("# sent_id = s" + std::to_string(k));
    if (rng.bernoulli(0.5)) ct.tree.comments.push_back("# text = " + random_field(rng, true));
    for (int j = 0; j < ct.tree.size(); ++j)
      ct.extras.push_back({rng.bernoulli(0.5) ? "_" : random_field(rng), rng.bernoulli(0.5) ? "_" : "Case=Nom|Number=Sing",
                           "_", rng.bernoulli(0.3) ? "SpaceAfter=No" : "_"});
    doc.push_back(std::move(ct));
  }
  return doc;
}

inline AlignmentFile random_alignment_file(Rng& rng) {
  AlignmentFile f;
  const int lines = rng.range(1, 8);
  for (int k = 0; k < lines; ++k) f.push_back(random_links(rng, rng.range(1, 12), rng.range(1, 12), 0.12));
  return f;
}

}  // namespace xsdp::testing

#endif  // XSDP_TESTS_SUPPORT_ORACLES_H_
