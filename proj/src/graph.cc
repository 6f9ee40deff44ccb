#include "xsdp/graph.h"

#include <algorithm>
#include <stdexcept>

namespace xsdp {

Sentence make_sentence(const std::vector<std::string>& forms,
                       const std::vector<std::string>& pos) {
  Sentence s;
  s.reserve(forms.size());
  for (std::size_t k = 0; k < forms.size(); ++k) {
    Token t;
    t.index = static_cast<int>(k) + 1;
    t.form = forms[k];
    t.lemma = forms[k];
    if (k < pos.size()) t.pos = pos[k];
    s.push_back(std::move(t));
  }
  return s;
}

SemanticGraph::SemanticGraph(Sentence s, std::vector<Edge> e, bool is_gold)
    : tokens(std::move(s)), edges(std::move(e)), gold(is_gold) {
  std::sort(edges.begin(), edges.end());
}

void SemanticGraph::add_edge(int head, int dep, std::string label) {
  Edge e{head, dep, std::move(label)};
  edges.insert(std::upper_bound(edges.begin(), edges.end(), e), std::move(e));
}

std::vector<int> SemanticGraph::tops() const {
  std::vector<int> out;
  for (const auto& e : edges) {
    if (e.head != 0) break;
    out.push_back(e.dep);
  }
  return out;
}

const std::string* SemanticGraph::find(int head, int dep) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), head,
                             [](const Edge& e, int h) { return e.head < h; });
  for (; it != edges.end() && it->head == head; ++it) {
    if (it->dep == dep) return &it->label;
    if (it->dep > dep) break;
  }
  return nullptr;
}

PartialGraph::PartialGraph(SemanticGraph g, std::vector<int> aligned_tokens)
    : graph(std::move(g)), aligned(std::move(aligned_tokens)) {
  aligned.push_back(0);
  std::sort(aligned.begin(), aligned.end());
  aligned.erase(std::unique(aligned.begin(), aligned.end()), aligned.end());
  for (int a : aligned) {
    if (a < 0 || a > graph.size())
      throw std::invalid_argument("aligned index " + std::to_string(a) +
                                  " outside sentence of length " +
                                  std::to_string(graph.size()));
  }
  for (const auto& e : graph.edges) {
    if (!decided(e.head, e.dep))
      throw std::invalid_argument("edge (" + std::to_string(e.head) + "," +
                                  std::to_string(e.dep) +
                                  ") touches an unaligned token");
  }
}

PartialGraph PartialGraph::full(SemanticGraph g) {
  std::vector<int> all(static_cast<std::size_t>(g.size()) + 1);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return PartialGraph(std::move(g), std::move(all));
}

bool PartialGraph::is_aligned(int i) const {
  return std::binary_search(aligned.begin(), aligned.end(), i);
}

double PartialGraph::density() const {
  if (graph.size() == 0) throw std::invalid_argument("density of an empty sentence");
  return static_cast<double>(aligned.size() - 1) / graph.size();
}

std::vector<char> PartialGraph::aligned_mask() const {
  std::vector<char> m(static_cast<std::size_t>(graph.size()) + 1, 0);
  for (int a : aligned) m[static_cast<std::size_t>(a)] = 1;
  return m;
}

bool SyntacticTree::well_formed() const {
  const int n = size();
  if (static_cast<int>(heads.size()) != n) return false;
  int roots = 0;
  for (int h : heads) {
    if (h < 0 || h > n) return false;
    if (h == 0) ++roots;
  }
  if (roots != 1) return false;
  // Every token must reach the root within n steps.
  for (int j = 1; j <= n; ++j) {
    int cur = j;
    int steps = 0;
    while (cur != 0 && steps <= n) {
      cur = head(cur);
      ++steps;
    }
    if (cur != 0) return false;
  }
  return true;
}

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kIndexOutOfRange: return "index-out-of-range";
    case ViolationKind::kSelfLoop: return "self-loop";
    case ViolationKind::kDuplicatePair: return "duplicate-pair";
    case ViolationKind::kRootLabel: return "root-label";
    case ViolationKind::kCycle: return "cycle";
    case ViolationKind::kMissingTop: return "missing-top";
    case ViolationKind::kMultipleTops: return "multiple-tops";
  }
  return "unknown";
}

namespace {

std::string edge_str(const Edge& e) {
  return "(" + std::to_string(e.head) + "," + std::to_string(e.dep) + ",\"" + e.label + "\")";
}

}  // namespace

std::vector<Violation> validate_graph(const SemanticGraph& g, bool strict) {
  std::vector<Violation> out;
  const int n = g.size();
  for (std::size_t k = 0; k < g.tokens.size(); ++k) {
    if (g.tokens[k].index != static_cast<int>(k) + 1)
      out.push_back({ViolationKind::kIndexOutOfRange,
                     "token at position " + std::to_string(k + 1) + " has index " +
                         std::to_string(g.tokens[k].index)});
  }
  bool in_range = true;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    if (e.head < 0 || e.head > n || e.dep < 1 || e.dep > n) {
      out.push_back({ViolationKind::kIndexOutOfRange, "edge " + edge_str(e)});
      in_range = false;
      continue;
    }
    if (e.head == e.dep) out.push_back({ViolationKind::kSelfLoop, "edge " + edge_str(e)});
    if (e.head == 0 && e.label != kTopLabel)
      out.push_back({ViolationKind::kRootLabel, "root edge " + edge_str(e)});
    if (k > 0 && g.edges[k - 1].head == e.head && g.edges[k - 1].dep == e.dep)
      out.push_back({ViolationKind::kDuplicatePair, "edge " + edge_str(e)});
  }
  if (in_range && !is_acyclic(g))
    out.push_back({ViolationKind::kCycle, "graph contains a directed cycle"});
  if (strict) {
    const auto t = g.tops();
    if (t.empty()) out.push_back({ViolationKind::kMissingTop, "no top node"});
    if (t.size() > 1)
      out.push_back({ViolationKind::kMultipleTops, std::to_string(t.size()) + " top nodes"});
  }
  return out;
}

bool is_acyclic(const SemanticGraph& g) {
  // Kahn's algorithm over real-token edges.
  const int n = g.size();
  std::vector<int> indeg(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n) + 1);
  for (const auto& e : g.edges) {
    if (e.head < 1 || e.head > n || e.dep < 1 || e.dep > n) continue;
    out[static_cast<std::size_t>(e.head)].push_back(e.dep);
    ++indeg[static_cast<std::size_t>(e.dep)];
  }
  std::vector<int> ready;
  for (int i = 1; i <= n; ++i)
    if (indeg[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
  int seen = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++seen;
    for (int w : out[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push_back(w);
  }
  return seen == n;
}

int dependency_length(int head, int dep) {
  if (head == 0) throw std::invalid_argument("dependency_length: root edges have no length");
  if (head == dep) throw std::invalid_argument("dependency_length: head equals dependent");
  return head > dep ? head - dep : dep - head;
}

int length_bucket(int length) {
  if (length < 1) throw std::invalid_argument("length_bucket: non-positive length");
  if (length <= 4) return length - 1;
  if (length <= 9) return 4;
  return 5;
}

}  // namespace xsdp
