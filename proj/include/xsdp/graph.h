#ifndef XSDP_GRAPH_H_
#define XSDP_GRAPH_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace xsdp {

// Reserved label of the virtual-root edges that mark top nodes.
inline constexpr std::string_view kTopLabel = "TOP";

struct Token {
  int index = 0;  // 1-based; index 0 is the implicit dummy root
  std::string form;
  std::string lemma;
  std::string pos;
  std::string frame;  // opaque; empty when absent

  bool operator==(const Token&) const = default;
};

using Sentence = std::vector<Token>;

// Builds a sentence with indices 1..n from bare forms (lemma = form).
Sentence make_sentence(const std::vector<std::string>& forms,
                       const std::vector<std::string>& pos = {});

struct Edge {
  int head = 0;  // 0..n, 0 = virtual root
  int dep = 0;   // 1..n
  std::string label;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

// Labeled directed graph over the tokens of one sentence. Tops are edges
// (0, t, "TOP"). Edges are kept sorted by (head, dep, label); structural
// problems (self loops, duplicate pairs, cycles) are representable so that
// validate_graph can report them.
struct SemanticGraph {
  Sentence tokens;
  std::vector<Edge> edges;
  bool gold = false;

  SemanticGraph() = default;
  explicit SemanticGraph(Sentence s, std::vector<Edge> e = {}, bool is_gold = false);

  int size() const { return static_cast<int>(tokens.size()); }
  void add_edge(int head, int dep, std::string label);
  void add_top(int t) { add_edge(0, t, std::string(kTopLabel)); }
  std::vector<int> tops() const;
  // Label of (head, dep), or nullptr when absent.
  const std::string* find(int head, int dep) const;

  bool operator==(const SemanticGraph&) const = default;
};

// A projected graph plus the set of target tokens that carry an alignment.
// Cell (i, j) is decided iff both i and j are aligned; 0 is always aligned.
struct PartialGraph {
  SemanticGraph graph;
  std::vector<int> aligned;  // sorted, unique, contains 0

  PartialGraph() = default;
  PartialGraph(SemanticGraph g, std::vector<int> aligned_tokens);
  // Fully decided wrapper.
  static PartialGraph full(SemanticGraph g);

  int size() const { return graph.size(); }
  bool is_aligned(int i) const;
  bool decided(int head, int dep) const { return is_aligned(head) && is_aligned(dep); }
  // Aligned real tokens (excluding the root) over sentence length.
  double density() const;
  // Row-per-index flags 0..n.
  std::vector<char> aligned_mask() const;

  bool operator==(const PartialGraph&) const = default;
};

struct SyntacticTree {
  Sentence tokens;
  std::vector<int> heads;            // heads[k] is the head of token k+1
  std::vector<std::string> deprels;  // parallel to heads
  std::vector<std::string> comments;  // carried through I/O verbatim

  int size() const { return static_cast<int>(tokens.size()); }
  int head(int dep) const { return heads[static_cast<std::size_t>(dep - 1)]; }
  const std::string& deprel(int dep) const { return deprels[static_cast<std::size_t>(dep - 1)]; }
  // Exactly one root, every head in range, no cycles.
  bool well_formed() const;

  bool operator==(const SyntacticTree&) const = default;
};

enum class ViolationKind {
  kIndexOutOfRange,
  kSelfLoop,
  kDuplicatePair,
  kRootLabel,
  kCycle,
  kMissingTop,
  kMultipleTops,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

std::string_view to_string(ViolationKind k);

// Returns every invariant violation; strict additionally requires exactly one top.
std::vector<Violation> validate_graph(const SemanticGraph& g, bool strict);

// True iff the edges among real tokens (head >= 1) contain no directed cycle.
bool is_acyclic(const SemanticGraph& g);

// |head - dep|. Throws std::invalid_argument for head == dep or head == 0.
int dependency_length(int head, int dep);

inline constexpr int kNumLengthBuckets = 6;
inline constexpr std::array<std::string_view, kNumLengthBuckets> kLengthBucketNames = {
    "1", "2", "3", "4", "5-9", ">=10"};

// Bucket index into kLengthBucketNames for a positive length.
int length_bucket(int length);

}  // namespace xsdp

#endif  // XSDP_GRAPH_H_
