// Acceptance run: one PASS/FAIL line per criterion. Pass criterion names as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.h"
#include "support/primitive_checks.h"
#include "xsdp/evaluation.h"
#include "xsdp/formats.h"
#include "xsdp/pipeline.h"
#include "xsdp/projection.h"
#include "xsdp/synth.h"
#include "xsdp/training.h"

using namespace xsdp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NetworkConfig toy_dims() {
  NetworkConfig n;
  n.word_dim = 32;
  n.pos_dim = 32;
  n.char_dim = 32;
  n.lstm_dim = 64;
  n.fnn_dim = 64;
  return n;
}

// ---------------------------------------------------------------------------

Outcome gradient_correctness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  std::size_t coords = 0;
  for (bool multitask : {false, true}) {
    ad::GradCheckReport r = parser_gradient_check(8, 1, multitask);
    worst = std::max(worst, r.max_rel_error);
    coords += r.coords_checked;
    if (!(r.max_rel_error < 1e-4))
      o.fail(std::string(multitask ? "multitask" : "single-task") + " parser loss: rel error " +
             fmt("%.3g", r.max_rel_error) + " at " + r.worst_param);
  }
  ad::GradCheckOptions prim;
  prim.tolerance = 1e-7;
  double worst_prim = 0;
  for (const auto& c : testing::run_primitive_checks(prim)) {
    worst_prim = std::max(worst_prim, c.report.max_rel_error);
    if (!(c.report.max_rel_error < 1e-7)) o.fail("primitive " + c.name + ": rel error " + fmt("%.3g", c.report.max_rel_error));
  }
  const double secs = seconds_since(t0);
  if (secs >= 60) o.fail("took " + fmt("%.1f", secs) + " s");
  if (o.pass)
    o.detail = "parser max rel error " + fmt("%.2e", worst) + " over " + std::to_string(coords) +
               " coords, primitives " + fmt("%.2e", worst_prim);
  return o;
}

Outcome masking_soundness() {
  Outcome o;
  SynthConfig sc;
  sc.sentence_count = 12;
  sc.min_length = 4;
  sc.max_length = 10;
  sc.alignment_density = 0.6;
  SynthCorpus c = synth_corpus(sc);
  std::vector<PartialGraph> proj = project_corpus(c.source_graphs, c.target_sentences, c.forward, c.backward);
  std::vector<SemanticGraph> sem;
  for (const auto& p : proj) sem.push_back(p.graph);
  NetworkConfig net;
  net.word_dim = 16;
  net.pos_dim = 8;
  net.char_dim = 8;
  net.lstm_dim = 16;
  net.lstm_layers = 2;
  net.fnn_dim = 16;
  const Vocabularies vocab = build_vocabularies(sem, c.trees);

  struct Run {
    std::vector<double> losses;
    std::vector<std::map<std::string, ad::Matrix>> params;
  };
  // The second corpus carries arbitrary content at every undecided cell of
  // the edge target grid (unaligned rows/columns and the diagonal).
  int scrambled = 0;
  auto run = [&](bool scramble) {
    ParserModel m(net, {}, {Task::kSemantic}, vocab, 17);
    std::vector<SemItem> items;
    Rng noise(4242);
    for (const auto& p : proj) {
      SemItem it = make_sem_item(m, p);
      if (scramble)
        for (Eigen::Index k = 0; k < it.targets.edge_target.size(); ++k)
          if (it.targets.edge_weight.data()[k] == 0) {
            it.targets.edge_target.data()[k] = noise.bernoulli(0.5) ? 1.0 : 0.0;
            ++scrambled;
          }
      items.push_back(std::move(it));
    }
    TrainConfig tc;
    tc.token_budget = 20;
    Trainer tr(m, tc);
    std::vector<int> lengths;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < items.size(); ++i) {
      lengths.push_back(items[i].input.size());
      order.push_back(i);
    }
    auto batches = pack_batches(lengths, order, tc.token_budget);
    Run r;
    for (int step = 0; step < 10; ++step) {
      std::vector<const SemItem*> b;
      for (std::size_t i : batches[static_cast<std::size_t>(step) % batches.size()]) b.push_back(&items[i]);
      r.losses.push_back(tr.sem_step(b));
      r.params.push_back(m.params().snapshot());
    }
    return r;
  };
  Run a = run(false), b = run(true);
  if (scrambled == 0) o.fail("no undecided cells in the test corpus");
  for (std::size_t s = 0; s < 10; ++s) {
    if (a.losses[s] != b.losses[s]) o.fail("loss differs at step " + std::to_string(s + 1));
    if (a.params[s] != b.params[s]) o.fail("parameters differ after step " + std::to_string(s + 1));
  }

  // Corpus level: source edges touching unaligned source words never reach
  // the projected corpus.
  for (std::size_t i = 0; i < c.size(); ++i) {
    IntersectedAlignment al = intersect_alignments(c.forward[i], c.backward[i], c.source_graphs[i].size());
    SemanticGraph extra = c.source_graphs[i];
    for (int s = 1; s <= extra.size(); ++s) {
      if (al.target(s)) continue;
      if (!extra.find(0, s)) extra.add_top(s);
      for (int t = 1; t <= extra.size(); ++t)
        if (t != s && !extra.find(s, t)) extra.add_edge(s, t, "RSTR");
    }
    if (!(project_graph(extra, al, c.target_sentences[i]) == proj[i])) o.fail("unaligned source edges leaked");
  }
  if (o.pass) o.detail = "10 steps bit-identical with " + std::to_string(scrambled) + " undecided target cells altered";
  return o;
}

Outcome projection_oracle() {
  Outcome o;
  Rng rng(20240);
  int edges = 0, dropped = 0;
  for (int it = 0; it < 1000; ++it) {
    const int m = rng.range(1, 12), n = rng.range(1, 12);
    SemanticGraph src = testing::random_graph(rng, testing::random_sentence(rng, m), 0.3, 0.2);
    Sentence tgt = testing::random_sentence(rng, n);
    // A partial one-to-one map shared by both directions plus sparse noise
    // links, so that intersection keeps many links and also drops some.
    std::vector<int> perm(static_cast<std::size_t>(std::max(m, n)));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i) + 1;
    rng.shuffle(perm);
    AlignmentSet fwd = testing::random_links(rng, m, n, 0.04), bwd = testing::random_links(rng, m, n, 0.04);
    for (int src_tok = 1; src_tok <= m; ++src_tok) {
      const int t = perm[static_cast<std::size_t>(src_tok - 1)];
      if (t <= n && rng.bernoulli(0.85)) {
        fwd.insert({src_tok, t});
        bwd.insert({src_tok, t});
      }
    }
    AlignmentSet links = testing::oracle_intersect(fwd, bwd);
    IntersectedAlignment al = intersect_alignments(fwd, bwd, m);
    PartialGraph p = project_graph(src, al, tgt);
    auto want = testing::oracle_project(src, links, n);
    bool ok = p.aligned == want.aligned && p.graph.edges.size() == want.cells.size();
    for (const auto& [cell, labels] : want.cells) {
      const std::string* got = p.graph.find(cell.first, cell.second);
      ok = ok && labels.size() == 1 && got && *got == *labels.begin();
    }
    if (!ok) {
      o.fail("instance " + std::to_string(it) + " differs");
      break;
    }
    edges += static_cast<int>(p.graph.edges.size());
    dropped += static_cast<int>(src.edges.size() - p.graph.edges.size());
  }
  if (o.pass)
    o.detail = "1000 instances, " + std::to_string(edges) + " edges projected, " + std::to_string(dropped) + " dropped";
  return o;
}

SemanticGraph hand_graph(int n, std::vector<Edge> edges) {
  std::vector<std::string> forms;
  for (int i = 1; i <= n; ++i) forms.push_back("w" + std::to_string(i));
  return SemanticGraph(make_sentence(forms), std::move(edges));
}

Outcome scorer_oracle() {
  Outcome o;
  Rng rng(31337);
  for (int it = 0; it < 500 && o.pass; ++it) {
    std::vector<SemanticGraph> gold, pred;
    const int docs = rng.range(1, 6);
    for (int d = 0; d < docs; ++d) {
      Sentence s = testing::random_sentence(rng, rng.range(1, 10));
      gold.push_back(testing::random_graph(rng, s, 0.25, 0.3));
      pred.push_back(rng.bernoulli(0.3) ? gold.back() : testing::random_graph(rng, s, 0.25, 0.3));
    }
    auto want = testing::oracle_score(pred, gold);
    ScoreReport r = score_graphs(pred, gold);
    if (!(r.labeled == Counts{want.gold, want.predicted, want.labeled}) ||
        !(r.unlabeled == Counts{want.gold, want.predicted, want.unlabeled}) ||
        r.lf != testing::oracle_f1(want.labeled, want.gold, want.predicted) ||
        r.uf != testing::oracle_f1(want.unlabeled, want.gold, want.predicted))
      o.fail("corpus " + std::to_string(it) + " differs");
  }
  // Hand cases.
  ScoreReport half = score_graphs({hand_graph(3, {{0, 2, "TOP"}, {2, 1, "ACT-arg"}})},
                                  {hand_graph(3, {{0, 2, "TOP"}, {2, 1, "PAT-arg"}})});
  if (half.lf != 0.5 || half.uf != 1.0) o.fail("1-of-2 labeled case gives LF " + fmt("%g", half.lf));
  ScoreReport pr = score_graphs({hand_graph(4, {{0, 2, "TOP"}, {2, 1, "A"}})},
                                {hand_graph(4, {{0, 2, "TOP"}, {2, 1, "A"}, {2, 3, "B"}, {3, 4, "C"}})});
  if (pr.lp != 1.0 || pr.lr != 0.5 || pr.lf != 2.0 / 3.0) o.fail("precision/recall hand case");
  if (o.pass) o.detail = "500 corpora exact, hand cases LF 0.5 / UF 1.0 and P 1 / R 0.5";
  return o;
}

Outcome memorization() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SynthConfig sc;
  sc.sentence_count = 20;
  sc.seed = 11;
  SynthCorpus c = synth_corpus(sc);
  std::vector<PartialGraph> train_set;
  for (const auto& g : c.gold_graphs) train_set.push_back(PartialGraph::full(g));
  ParserModel m(toy_dims(), {}, {Task::kSemantic}, build_vocabularies(c.gold_graphs, {}), 3);
  TrainData data;
  data.sem_train = train_set;
  data.sem_heldout = train_set;  // early stopping watches the training LF itself
  TrainConfig tc;
  tc.max_epochs = 500;
  tc.patience = 500;
  tc.token_budget = 1;  // one sentence per step
  tc.stop_lf = 0.99;
  TrainResult r = train(m, data, tc);
  ScoreReport s = score_graphs(parse_corpus(m, c.target_sentences), c.gold_graphs);
  const double secs = seconds_since(t0);
  if (!(s.lf >= 0.99)) o.fail("train LF " + fmt("%.4f", s.lf) + " after " + std::to_string(r.epochs.size()) + " epochs");
  if (secs >= 300) o.fail("took " + fmt("%.1f", secs) + " s");
  if (o.pass)
    o.detail = "train LF " + fmt("%.4f", s.lf) + " at epoch " + std::to_string(r.best_epoch) + ", " +
               fmt("%.1f", secs) + " s";
  return o;
}

Outcome multitask_direction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  TrainConfig tc;
  tc.max_epochs = 60;
  tc.patience = 15;
  tc.token_budget = 50;
  tc.adam.lr = 0.002;
  double sum = 0;
  std::ostringstream per;
  const int seeds = 5;
  for (int s = 1; s <= seeds; ++s) {
    SynthConfig sc;
    sc.seed = 100 + static_cast<std::uint64_t>(s);
    sc.alignment_density = 0.8;
    sc.syntactic_agreement = 0.8;
    // 320 projected sentences: 300 train, 20 heldout for early stopping.
    Experiment ex = make_experiment(sc, 320, 100, 20.0 / 320, static_cast<std::uint64_t>(s));
    tc.seed = static_cast<std::uint64_t>(s);
    const SharingTopology shared{true, false, false};
    ExperimentRun single = run_experiment(ex, toy_dims(), shared, false, tc, static_cast<std::uint64_t>(s));
    ExperimentRun multi = run_experiment(ex, toy_dims(), shared, true, tc, static_cast<std::uint64_t>(s));
    const double d = multi.test.lf - single.test.lf;
    sum += d;
    per << (s > 1 ? " " : "") << fmt("%+.4f", d);
  }
  const double mean = sum / seeds;
  const double secs = seconds_since(t0);
  if (!(mean > 0)) o.fail("mean LF change " + fmt("%+.4f", mean) + " (per seed " + per.str() + ")");
  if (secs >= 1800) o.fail("took " + fmt("%.0f", secs) + " s");
  if (o.pass)
    o.detail = "mean LF gain " + fmt("%+.4f", mean) + " over 5 seeds (" + per.str() + "), " + fmt("%.0f", secs) + " s";
  return o;
}

Outcome sharing_semantics() {
  Outcome o;
  SynthConfig sc;
  sc.sentence_count = 10;
  SynthCorpus c = synth_corpus(sc);
  NetworkConfig net;
  net.word_dim = 16;
  net.pos_dim = 8;
  net.char_dim = 8;
  net.lstm_dim = 16;
  net.lstm_layers = 2;
  net.fnn_dim = 16;
  const Vocabularies vocab = build_vocabularies(c.gold_graphs, c.trees);
  // Word, POS and character embeddings feed both tasks under every topology,
  // so they are frozen to isolate the layers the topology controls.
  auto changed = [&](SharingTopology topo) {
    ParserModel m(net, topo, {Task::kSemantic, Task::kSyntactic}, vocab, 5);
    for (auto* p : m.params().all())
      if (p->name.rfind("embed.", 0) == 0 || p->name.rfind("char.", 0) == 0) p->trainable = false;
    std::vector<EncodedSentence> inputs;
    std::vector<ScoreValues> before;
    for (const auto& s : c.target_sentences) {
      inputs.push_back(m.encode_input(s));
      before.push_back(m.predict_scores(inputs.back(), Task::kSemantic));
    }
    std::vector<SynItem> syn;
    for (std::size_t i = 0; i < 4; ++i) syn.push_back(make_syn_item(m, c.trees[i]));
    std::vector<const SynItem*> batch;
    for (const auto& it : syn) batch.push_back(&it);
    auto syn_before = m.predict_scores(inputs[0], Task::kSyntactic).edge;
    Trainer tr(m, TrainConfig{});
    tr.syn_step(batch);
    if (m.predict_scores(inputs[0], Task::kSyntactic).edge == syn_before) o.fail("syntactic step had no effect");
    int differ = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      ScoreValues after = m.predict_scores(inputs[i], Task::kSemantic);
      bool same = after.edge == before[i].edge;
      for (std::size_t k = 0; k < after.labels.size(); ++k) same = same && after.labels[k] == before[i].labels[k];
      if (!same) ++differ;
    }
    return differ;
  };
  const int shared = changed({true, false, false});
  const int shared_all = changed({true, true, false});
  const int none = changed({false, false, false});
  if (shared == 0) o.fail("shared RNN: semantic outputs unchanged");
  if (shared_all == 0) o.fail("shared RNN+FNN: semantic outputs unchanged");
  if (none != 0) o.fail("no sharing: " + std::to_string(none) + " sentences changed");
  if (o.pass)
    o.detail = "shared RNN changed " + std::to_string(shared) + "/10 sentences, no sharing changed 0 (exact)";
  return o;
}

Outcome round_trip() {
  Outcome o;
  Rng rng(777);
  for (int i = 0; i < 200 && o.pass; ++i) {
    const std::string text = write_sdp(testing::random_sdp_document(rng));
    std::istringstream in(text);
    if (write_sdp(read_sdp(in)) != text) o.fail("sdp document " + std::to_string(i));
  }
  for (int i = 0; i < 200 && o.pass; ++i) {
    const std::string text = testing::conllu_text(testing::random_conllu_document(rng));
    std::istringstream in(text);
    if (testing::conllu_text(read_conllu_full(in)) != text) o.fail("conllu document " + std::to_string(i));
  }
  for (int i = 0; i < 200 && o.pass; ++i) {
    const std::string text = testing::alignment_text(testing::random_alignment_file(rng));
    std::istringstream in(text);
    if (testing::alignment_text(read_alignments(in)) != text) o.fail("alignment document " + std::to_string(i));
  }
  if (o.pass) o.detail = "200 documents per format byte-identical";
  return o;
}

Outcome density_sampler() {
  Outcome o;
  SynthConfig sc;
  sc.sentence_count = 3000;
  sc.alignment_density = 0.8;
  sc.seed = 8;
  SynthCorpus c = synth_corpus(sc);
  auto proj = project_corpus(c.source_graphs, c.target_sentences, c.forward, c.backward);
  std::vector<PartialGraph> picked = density_sample(proj, 1000, 0.8, 1);
  int low = 0, high = 0;
  for (const auto& p : picked) (p.density() < 0.8 ? low : high) += 1;
  if (picked.size() != 1000 || low != 500 || high != 500)
    o.fail(std::to_string(picked.size()) + " sampled, " + std::to_string(low) + " below / " + std::to_string(high) +
           " at or above");
  if (o.pass) o.detail = "500 below / 500 at or above 0.8 out of 1000";
  return o;
}

Outcome pipeline_determinism() {
  Outcome o;
  NetworkConfig net;
  net.word_dim = 16;
  net.pos_dim = 8;
  net.char_dim = 8;
  net.lstm_dim = 16;
  net.lstm_layers = 2;
  net.fnn_dim = 16;
  TrainConfig tc;
  tc.max_epochs = 15;
  tc.patience = 100;
  tc.token_budget = 50;
  tc.adam.lr = 0.01;
  tc.seed = 4;
  auto run = [&]() {
    SynthConfig sc;
    sc.sentence_count = 10;  // overridden by make_experiment
    sc.seed = 21;
    Experiment ex = make_experiment(sc, 80, 20, 0.2, 4);
    return run_experiment(ex, net, {true, false, false}, true, tc, 4);
  };
  ExperimentRun a = run(), b = run();
  if (a.test.lf != b.test.lf) o.fail("LF " + fmt("%.17g", a.test.lf) + " vs " + fmt("%.17g", b.test.lf));
  if (!(a.predictions == b.predictions)) o.fail("predictions differ");
  if (o.pass) o.detail = "LF " + fmt("%.6f", a.test.lf) + " on both runs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient_correctness", gradient_correctness},
      {"masking_soundness", masking_soundness},
      {"projection_oracle", projection_oracle},
      {"scorer_oracle", scorer_oracle},
      {"memorization", memorization},
      {"multitask_direction", multitask_direction},
      {"sharing_semantics", sharing_semantics},
      {"round_trip_io", round_trip},
      {"density_sampler", density_sampler},
      {"pipeline_determinism", pipeline_determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what());
    }
    if (!r.pass) ++failures;
    std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << " [" << fmt("%.1f", seconds_since(t0))
              << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
