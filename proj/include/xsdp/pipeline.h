#ifndef XSDP_PIPELINE_H_
#define XSDP_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "xsdp/autodiff.h"
#include "xsdp/evaluation.h"
#include "xsdp/formats.h"
#include "xsdp/network.h"
#include "xsdp/synth.h"
#include "xsdp/training.h"

namespace xsdp {

// Intersects each sentence pair's alignments and projects the source graph.
std::vector<PartialGraph> project_corpus(const std::vector<SemanticGraph>& source,
                                         const std::vector<Sentence>& target, const AlignmentFile& forward,
                                         const AlignmentFile& backward);

// Synthetic cross-lingual setup: the first `projected` sentences of a
// synthetic corpus are projected and split into train / heldout, the next
// `test` sentences keep their gold target graphs. Syntactic trees of the
// training sentences form the auxiliary corpus.
struct Experiment {
  std::vector<PartialGraph> train;
  std::vector<PartialGraph> heldout;
  std::vector<SyntacticTree> syn_train;
  std::vector<SemanticGraph> test_gold;
  std::vector<SyntacticTree> test_trees;
};

Experiment make_experiment(SynthConfig synth, int projected, int test, double heldout_fraction,
                           std::uint64_t split_seed);

struct ExperimentRun {
  TrainResult train;
  std::vector<SemanticGraph> predictions;  // on test_gold sentences
  ScoreReport test;
};

// Builds vocabularies from the training data, trains a single-task model
// (multitask = false) or a sem+syn model, and scores it on the test graphs.
ExperimentRun run_experiment(const Experiment& ex, const NetworkConfig& net, const SharingTopology& sharing,
                             bool multitask, const TrainConfig& train, std::uint64_t model_seed,
                             std::ostream* log = nullptr);

// Central-difference check of the full parser loss (semantic, plus the
// syntactic loss when multitask) on a 4-token sentence with a partially
// decided graph; every dimension is `dim`, dropout is off.
ad::GradCheckReport parser_gradient_check(int dim, std::uint64_t seed, bool multitask,
                                          const ad::GradCheckOptions& opt = {});

}  // namespace xsdp

#endif  // XSDP_PIPELINE_H_
