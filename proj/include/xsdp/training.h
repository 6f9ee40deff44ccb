#ifndef XSDP_TRAINING_H_
#define XSDP_TRAINING_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "xsdp/evaluation.h"
#include "xsdp/network.h"
#include "xsdp/optimizer.h"

namespace xsdp {

struct TrainConfig {
  ad::AdamConfig adam;
  int token_budget = 1000;
  double lambda_label = 0.5;  // label vs. edge interpolation within a task
  double omega_sem = 0.975;   // task weights
  double omega_syn = 0.025;
  int max_epochs = 100;
  int patience = 5;
  std::uint64_t seed = 1;
  bool combined_step = false;  // one step on a sem+syn batch pair instead of alternating
  bool eval_train = false;     // also score the training set after each epoch
  double stop_lf = 2.0;        // stop as soon as heldout LF reaches this (> 1 disables)
  void validate() const;
};

// ---- losses ------------------------------------------------------------------------

// Edge targets/weights over the (n+1) x n score grid and the gold label cells.
struct SemanticTargets {
  Matrix edge_target;                           // 1 at gold edges (tops included)
  Matrix edge_weight;                           // 1 at decided off-diagonal cells, else 0
  std::vector<std::pair<int, int>> label_cells; // (head, dep) token indices of non-top gold edges
  std::vector<int> label_ids;
};

SemanticTargets semantic_targets(const PartialGraph& gold, const Vocab& labels);

// lambda * label + (1 - lambda) * edge. label_at_cells is E x L in the order
// of targets.label_cells (ignored when there are no label cells).
Expr semantic_loss(const Expr& edge, const Expr& label_at_cells, const SemanticTargets& targets, double lambda);
// Same, reading label scores from full per-label matrices.
Expr semantic_loss(const TaskScores& scores, const PartialGraph& gold, const Vocab& labels, double lambda);

struct SyntacticTargets {
  std::vector<int> heads;                        // per dependent
  Matrix allowed;                                // n x (n+1), self excluded
  std::vector<std::pair<int, int>> label_cells;  // (gold head, dep)
  std::vector<int> label_ids;
};

SyntacticTargets syntactic_targets(const SyntacticTree& gold, const Vocab& labels);
Expr syntactic_loss(const Expr& edge, const Expr& label_at_cells, const SyntacticTargets& targets, double lambda);
Expr syntactic_loss(const TaskScores& scores, const SyntacticTree& gold, const Vocab& labels, double lambda);

// ---- parsing -----------------------------------------------------------------------

// Eval-mode parse; label scores are computed only at predicted cells.
SemanticGraph parse_semantic(ParserModel& m, const EncodedSentence& in, const Sentence& s);
SyntacticTree parse_syntactic(ParserModel& m, const EncodedSentence& in, const Sentence& s);
// Parses sentences with up to `threads` workers; output order follows input.
std::vector<SemanticGraph> parse_corpus(ParserModel& m, const std::vector<Sentence>& sentences,
                                        const std::vector<ContextMatrix>* context = nullptr, int threads = 1);

// Drops predicted edges at undecided cells.
SemanticGraph restrict_to_decided(const SemanticGraph& predicted, const PartialGraph& reference);

// ---- training ----------------------------------------------------------------------

struct SemItem {
  EncodedSentence input;
  SemanticTargets targets;
};

struct SynItem {
  EncodedSentence input;
  SyntacticTargets targets;
};

SemItem make_sem_item(const ParserModel& m, const PartialGraph& gold, const ContextMatrix* context = nullptr);
SynItem make_syn_item(const ParserModel& m, const SyntacticTree& gold);

// Greedy packing in the given order: a sentence joins the open batch unless
// that would exceed the budget; oversize sentences sit alone.
std::vector<std::vector<std::size_t>> pack_batches(const std::vector<int>& lengths, const std::vector<std::size_t>& order,
                                                   int token_budget);

// Deterministic proportional interleaving of a sem and b syn batches:
// true = semantic. Ties go to the semantic task.
std::vector<bool> interleave(std::size_t a, std::size_t b);

class Trainer {
 public:
  Trainer(ParserModel& model, TrainConfig cfg);

  // One optimizer step; returns the unweighted summed loss of the batch.
  double sem_step(const std::vector<const SemItem*>& batch);
  double syn_step(const std::vector<const SynItem*>& batch);
  // One step on omega_sem * sem + omega_syn * syn; returns {sem, syn} losses.
  std::pair<double, double> combined_step(const std::vector<const SemItem*>& sem,
                                          const std::vector<const SynItem*>& syn);
  // omega_sem * sem + omega_syn * syn on t, without stepping.
  Expr combined_loss(Tape& t, const std::vector<const SemItem*>& sem, const std::vector<const SynItem*>& syn);

  Rng& sem_rng() { return sem_rng_; }
  Rng& syn_rng() { return syn_rng_; }
  const TrainConfig& config() const { return cfg_; }

 private:
  Expr sem_batch_loss(Tape& t, const std::vector<const SemItem*>& batch);
  Expr syn_batch_loss(Tape& t, const std::vector<const SynItem*>& batch);
  void finish(Tape& t, const Expr& loss, const char* what);

  ParserModel& model_;
  TrainConfig cfg_;
  Rng sem_rng_, syn_rng_;
};

struct TrainData {
  std::vector<PartialGraph> sem_train;
  std::vector<PartialGraph> sem_heldout;
  std::vector<SyntacticTree> syn_train;
  std::vector<ContextMatrix> sem_train_context;    // empty, or one per sentence
  std::vector<ContextMatrix> sem_heldout_context;  // empty, or one per sentence
};

struct EpochRecord {
  int epoch = 0;
  double sem_loss = 0;
  double syn_loss = 0;
  int steps = 0;
  double heldout_lf = 0;
  double heldout_uf = 0;
  double train_lf = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_lf = -1;
  bool stopped_early = false;
};

std::string format_epoch(const EpochRecord& r);

// Trains with early stopping on heldout LF (predictions restricted to decided
// cells) and restores the best parameters. Throws std::runtime_error on a
// non-finite loss. One key=value line per epoch goes to log when given.
TrainResult train(ParserModel& model, const TrainData& data, const TrainConfig& cfg, std::ostream* log = nullptr);

}  // namespace xsdp

#endif  // XSDP_TRAINING_H_
