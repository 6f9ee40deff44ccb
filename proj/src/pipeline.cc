#include "xsdp/pipeline.h"

#include <cmath>
#include <stdexcept>

#include "xsdp/projection.h"

namespace xsdp {

std::vector<PartialGraph> project_corpus(const std::vector<SemanticGraph>& source,
                                         const std::vector<Sentence>& target, const AlignmentFile& forward,
                                         const AlignmentFile& backward) {
  const std::size_t n = source.size();
  if (target.size() != n || forward.size() != n || backward.size() != n)
    throw std::invalid_argument("project: " + std::to_string(n) + " source graphs, " + std::to_string(target.size()) +
                                " target sentences, " + std::to_string(forward.size()) + " forward and " +
                                std::to_string(backward.size()) + " backward alignment lines");
  std::vector<PartialGraph> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      auto a = intersect_alignments(forward[i], backward[i], source[i].size());
      out.push_back(project_graph(source[i], a, target[i]));
    } catch (const std::exception& e) {
      throw std::invalid_argument("sentence pair " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

Experiment make_experiment(SynthConfig synth, int projected, int test, double heldout_fraction,
                           std::uint64_t split_seed) {
  if (projected < 2 || test < 1) throw std::invalid_argument("experiment needs projected >= 2 and test >= 1 sentences");
  synth.sentence_count = projected + test;
  SynthCorpus c = synth_corpus(synth);
  const auto P = static_cast<std::size_t>(projected);
  std::vector<SemanticGraph> src(c.source_graphs.begin(), c.source_graphs.begin() + projected);
  std::vector<Sentence> tgt(c.target_sentences.begin(), c.target_sentences.begin() + projected);
  AlignmentFile fwd(c.forward.begin(), c.forward.begin() + projected);
  AlignmentFile bwd(c.backward.begin(), c.backward.begin() + projected);
  std::vector<PartialGraph> proj = project_corpus(src, tgt, fwd, bwd);

  Experiment ex;
  Split s = heldout_split(P, heldout_fraction, split_seed);
  for (std::size_t i : s.train) {
    ex.train.push_back(proj[i]);
    ex.syn_train.push_back(c.trees[i]);
  }
  for (std::size_t i : s.heldout) ex.heldout.push_back(proj[i]);
  for (std::size_t i = P; i < c.size(); ++i) {
    ex.test_gold.push_back(c.gold_graphs[i]);
    ex.test_trees.push_back(c.trees[i]);
  }
  return ex;
}

ExperimentRun run_experiment(const Experiment& ex, const NetworkConfig& net, const SharingTopology& sharing,
                             bool multitask, const TrainConfig& train_cfg, std::uint64_t model_seed,
                             std::ostream* log) {
  std::vector<SemanticGraph> sem;
  for (const auto& p : ex.train) sem.push_back(p.graph);
  Vocabularies vocab = build_vocabularies(sem, multitask ? ex.syn_train : std::vector<SyntacticTree>{});
  std::vector<Task> tasks = {Task::kSemantic};
  if (multitask) tasks.push_back(Task::kSyntactic);
  ParserModel model(net, sharing, tasks, std::move(vocab), model_seed);

  TrainData data;
  data.sem_train = ex.train;
  data.sem_heldout = ex.heldout;
  if (multitask) data.syn_train = ex.syn_train;

  ExperimentRun run;
  run.train = train(model, data, train_cfg, log);
  std::vector<Sentence> sentences;
  for (const auto& g : ex.test_gold) sentences.push_back(g.tokens);
  run.predictions = parse_corpus(model, sentences);
  run.test = score_graphs(run.predictions, ex.test_gold);
  return run;
}

ad::GradCheckReport parser_gradient_check(int dim, std::uint64_t seed, bool multitask, const ad::GradCheckOptions& opt) {
  if (dim < 2 || dim % 2) throw std::invalid_argument("gradient check dimension must be even and >= 2");
  Sentence s = make_sentence({"Rok", "končící", "31", "prosince"}, {"NOUN", "VERB", "NUM", "NOUN"});
  SemanticGraph g(s);
  g.add_top(2);
  g.add_edge(2, 1, "ACT-arg");
  g.add_edge(2, 4, "TWHEN");
  g.add_edge(4, 3, "RSTR");
  // Token 3 unaligned in the partial view: its cells are masked.
  SemanticGraph projected(s);
  projected.add_top(2);
  projected.add_edge(2, 1, "ACT-arg");
  projected.add_edge(2, 4, "TWHEN");
  PartialGraph partial(projected, {0, 1, 2, 4});
  SyntacticTree tree;
  tree.tokens = s;
  tree.heads = {2, 0, 4, 2};
  tree.deprels = {"nsubj", "root", "nummod", "obl"};

  NetworkConfig net;
  net.word_dim = dim;
  net.pos_dim = dim;
  net.char_dim = dim;
  net.lstm_dim = dim;
  net.fnn_dim = dim;
  net.lstm_layers = 3;
  net.dropout = {0, 0, 0, 0, 0};
  SharingTopology sharing{true, false, multitask};
  std::vector<Task> tasks = {Task::kSemantic};
  if (multitask) tasks.push_back(Task::kSyntactic);
  ParserModel model(net, sharing, tasks, build_vocabularies({g}, multitask ? std::vector<SyntacticTree>{tree}
                                                                           : std::vector<SyntacticTree>{}),
                    seed);
  const EncodedSentence in = model.encode_input(s);
  const double lambda = 0.5;
  auto loss_fn = [&](Tape& t) {
    const RunMode mode = RunMode::eval();
    Expr loss = semantic_loss(model.forward(t, in, Task::kSemantic, mode), partial, model.labels(Task::kSemantic), lambda);
    if (multitask)
      loss = loss + ad::scale(syntactic_loss(model.forward(t, in, Task::kSyntactic, mode), tree,
                                             model.labels(Task::kSyntactic), lambda),
                              0.5);
    return loss;
  };
  return ad::gradient_check(loss_fn, model.params().trainable(), opt);
}

}  // namespace xsdp
