#ifndef XSDP_FORMATS_H_
#define XSDP_FORMATS_H_

#include <array>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "xsdp/graph.h"

namespace xsdp {

// Raised by every reader; line is 1-based within the stream (0 if unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// ---- SemEval 2015 SDP ----------------------------------------------------
//
// Block layout (tab separated, one block per sentence, blank line after):
//   #<id>
//   #aligned: 0 1 3 4          (optional; present iff the graph is partial)
//   ID FORM LEMMA POS TOP PRED FRAME ARG1 .. ARGk
// TOP/PRED are '+' or '-'. ARGc holds the label of the edge from the c-th
// predicate (in token order) to the row's token, or '_'. Empty LEMMA, POS
// and FRAME cells are written as '_'. A leading "#SDP 2015" line is accepted
// and skipped on read; it is never written.

struct SdpSentence {
  std::string id;
  SemanticGraph graph;
  std::optional<std::vector<int>> aligned;  // set for projected (partial) graphs

  // Partial view; a sentence without a mask is fully decided.
  PartialGraph partial() const;
  static SdpSentence from_partial(std::string id, const PartialGraph& p);

  bool operator==(const SdpSentence&) const = default;
};

using SdpDocument = std::vector<SdpSentence>;

SdpDocument read_sdp(std::istream& in);
void write_sdp(std::ostream& out, const SdpDocument& doc);
std::string write_sdp(const SdpDocument& doc);

// ---- CoNLL-U ---------------------------------------------------------------
//
// Ten columns; FORM LEMMA UPOS go to the token, HEAD/DEPREL to the tree.
// XPOS FEATS DEPS MISC are carried verbatim in ConlluExtras so trees
// round-trip. Multiword ranges (1-2) and empty nodes (1.1) are skipped.

struct ConlluTree {
  SyntacticTree tree;
  // Per token: XPOS FEATS DEPS MISC.
  std::vector<std::array<std::string, 4>> extras;

  bool operator==(const ConlluTree&) const = default;
};

std::vector<ConlluTree> read_conllu_full(std::istream& in);
std::vector<SyntacticTree> read_conllu(std::istream& in);
void write_conllu(std::ostream& out, const std::vector<ConlluTree>& trees);
void write_conllu(std::ostream& out, const std::vector<SyntacticTree>& trees);

// ---- Pharaoh alignments ----------------------------------------------------
//
// One line per sentence pair, space-separated "i-j" (0-based on disk).
// In memory pairs are (source, target), 1-based.

using AlignmentSet = std::set<std::pair<int, int>>;
using AlignmentFile = std::vector<AlignmentSet>;

AlignmentFile read_alignments(std::istream& in);
void write_alignments(std::ostream& out, const AlignmentFile& file);
std::string format_alignment_line(const AlignmentSet& links);

// ---- Context vectors ---------------------------------------------------------
//
// Text: one token per line of whitespace-separated floats, a blank line
// between sentences.

using ContextMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// token_counts, when given, must match the per-sentence row counts.
std::vector<ContextMatrix> read_context_vectors(
    std::istream& in, int expected_dim,
    const std::vector<int>* token_counts = nullptr);
void write_context_vectors(std::ostream& out, const std::vector<ContextMatrix>& vectors);

// Sentences for parsing: a .conllu or .sdp file by extension (tokens only).
std::vector<Sentence> read_sentences(const std::string& path);

}  // namespace xsdp

#endif  // XSDP_FORMATS_H_
