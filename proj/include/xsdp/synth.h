#ifndef XSDP_SYNTH_H_
#define XSDP_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "xsdp/formats.h"
#include "xsdp/graph.h"

namespace xsdp {

// Knobs of the synthetic parallel corpus.
//
// Target sentences come from a small seeded language: each word belongs to a
// POS class with a rank, and a token's syntactic head is the nearest token of
// strictly higher rank (ties go left; the leftmost top-rank token is the
// root). Semantic heads follow syntax except for "raising" words (prefix
// 'z', drawn with probability 1 - syntactic_agreement), whose semantic head
// is their syntactic grandparent. Source sentences are translations that
// keep the aligned subset of target tokens (locally reordered) plus extra
// source-only words; the source graph is the gold graph moved through the
// alignment with edge_noise corruption.
struct SynthConfig {
  int sentence_count = 100;
  int min_length = 5;
  int max_length = 15;
  std::vector<std::string> labels = {"ACT-arg", "PAT-arg", "ADDR-arg", "RSTR",
                                     "APP",     "TWHEN",   "LOC",      "CONJ.member"};
  double alignment_density = 0.8;
  double syntactic_agreement = 0.8;
  double edge_noise = 0.1;
  int words_per_class = 40;
  std::uint64_t seed = 7;
};

struct SynthCorpus {
  std::vector<SemanticGraph> source_graphs;
  std::vector<Sentence> target_sentences;
  std::vector<SemanticGraph> gold_graphs;  // target side, gold-flagged
  AlignmentFile forward;                   // source->target run
  AlignmentFile backward;                  // target->source run, as (source, target)
  std::vector<SyntacticTree> trees;        // target side

  std::size_t size() const { return target_sentences.size(); }
};

// Throws std::invalid_argument for an infeasible configuration.
void validate_synth_config(const SynthConfig& cfg);

SynthCorpus synth_corpus(const SynthConfig& cfg);

// Sentence id used in synthetic .sdp files.
std::string synth_sentence_id(std::size_t i);

// Writes source.sdp, target.gold.sdp, forward.align, backward.align and
// target.conllu into dir (created if missing). Returns the written paths.
std::vector<std::string> write_synth_corpus(const SynthCorpus& corpus, const std::string& dir);

}  // namespace xsdp

#endif  // XSDP_SYNTH_H_
