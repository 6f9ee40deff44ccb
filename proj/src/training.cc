#include "xsdp/training.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace xsdp {

void TrainConfig::validate() const {
  if (!(lambda_label > 0.0 && lambda_label < 1.0)) throw std::invalid_argument("lambda_label must be in (0, 1)");
  if (!(omega_sem > 0.0 && omega_sem <= 1.0) || !(omega_syn >= 0.0 && omega_syn < 1.0))
    throw std::invalid_argument("task weights must satisfy 0 < omega_sem <= 1 and 0 <= omega_syn < 1");
  if (std::abs(omega_sem + omega_syn - 1.0) > 1e-12) throw std::invalid_argument("omega_sem + omega_syn must be 1");
  if (token_budget < 1) throw std::invalid_argument("token_budget must be positive");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be positive");
  if (patience < 1) throw std::invalid_argument("patience must be positive");
  if (!(adam.lr >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
}

// ---- losses ------------------------------------------------------------------------

SemanticTargets semantic_targets(const PartialGraph& gold, const Vocab& labels) {
  const int n = gold.size();
  SemanticTargets t;
  t.edge_target = Matrix::Zero(n + 1, n);
  t.edge_weight = Matrix::Zero(n + 1, n);
  for (int h = 0; h <= n; ++h)
    for (int d = 1; d <= n; ++d)
      if (h != d && gold.decided(h, d)) t.edge_weight(h, d - 1) = 1.0;
  for (const auto& e : gold.graph.edges) {
    if (e.dep < 1 || e.dep > n || e.head < 0 || e.head > n || e.head == e.dep)
      throw std::invalid_argument("gold edge (" + std::to_string(e.head) + "," + std::to_string(e.dep) +
                                  ") is not a valid cell");
    if (!gold.decided(e.head, e.dep))
      throw std::invalid_argument("gold edge (" + std::to_string(e.head) + "," + std::to_string(e.dep) +
                                  ") lies on an undecided cell");
    t.edge_target(e.head, e.dep - 1) = 1.0;
    if (e.head == 0) continue;
    auto id = labels.find(e.label);
    if (!id) throw std::invalid_argument("label '" + e.label + "' is not in the model's label set");
    t.label_cells.emplace_back(e.head, e.dep);
    t.label_ids.push_back(*id);
  }
  return t;
}

Expr semantic_loss(const Expr& edge, const Expr& label_at_cells, const SemanticTargets& targets, double lambda) {
  Expr loss = ad::scale(ad::sigmoid_xent(edge, targets.edge_target, targets.edge_weight), 1.0 - lambda);
  if (!targets.label_cells.empty()) loss = loss + ad::scale(ad::softmax_xent(label_at_cells, targets.label_ids), lambda);
  return loss;
}

Expr semantic_loss(const TaskScores& scores, const PartialGraph& gold, const Vocab& labels, double lambda) {
  SemanticTargets t = semantic_targets(gold, labels);
  std::vector<std::pair<int, int>> cols;
  for (const auto& [h, d] : t.label_cells) cols.emplace_back(h, d - 1);
  Expr at = cols.empty() ? Expr() : ad::pick_cells(scores.labels, cols);
  return semantic_loss(scores.edge, at, t, lambda);
}

SyntacticTargets syntactic_targets(const SyntacticTree& gold, const Vocab& labels) {
  const int n = gold.size();
  if (static_cast<int>(gold.heads.size()) != n || static_cast<int>(gold.deprels.size()) != n)
    throw std::invalid_argument("syntactic tree arrays disagree with its length");
  SyntacticTargets t;
  t.allowed = Matrix::Ones(n, n + 1);
  for (int d = 1; d <= n; ++d) {
    t.allowed(d - 1, d) = 0.0;
    const int h = gold.head(d);
    if (h < 0 || h > n || h == d) throw std::invalid_argument("syntactic head of token " + std::to_string(d) + " is invalid");
    t.heads.push_back(h);
    auto id = labels.find(gold.deprel(d));
    if (!id) throw std::invalid_argument("deprel '" + gold.deprel(d) + "' is not in the model's label set");
    t.label_cells.emplace_back(h, d);
    t.label_ids.push_back(*id);
  }
  return t;
}

Expr syntactic_loss(const Expr& edge, const Expr& label_at_cells, const SyntacticTargets& targets, double lambda) {
  Expr head = ad::softmax_xent(ad::transpose(edge), targets.heads, &targets.allowed);
  return ad::scale(head, 1.0 - lambda) + ad::scale(ad::softmax_xent(label_at_cells, targets.label_ids), lambda);
}

Expr syntactic_loss(const TaskScores& scores, const SyntacticTree& gold, const Vocab& labels, double lambda) {
  SyntacticTargets t = syntactic_targets(gold, labels);
  std::vector<std::pair<int, int>> cols;
  for (const auto& [h, d] : t.label_cells) cols.emplace_back(h, d - 1);
  return syntactic_loss(scores.edge, ad::pick_cells(scores.labels, cols), t, lambda);
}

// ---- parsing -----------------------------------------------------------------------

namespace {

std::vector<int> row_argmax(const Matrix& m) {
  std::vector<int> out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    int best = 0;
    for (Eigen::Index c = 1; c < m.cols(); ++c)
      if (m(r, c) > m(r, best)) best = static_cast<int>(c);
    out.push_back(best);
  }
  return out;
}

}  // namespace

SemanticGraph parse_semantic(ParserModel& m, const EncodedSentence& in, const Sentence& s) {
  const int n = static_cast<int>(s.size());
  if (in.size() != n) throw std::invalid_argument("encoded input does not match the sentence");
  Tape t;
  const RunMode mode = RunMode::eval();
  Projections p = m.project(t, m.encode(t, m.embed(t, in, mode), Task::kSemantic, mode), Task::kSemantic, mode);
  const Matrix& edge = m.edge_scores(t, p, Task::kSemantic).value();
  SemanticGraph g(s);
  std::vector<std::pair<int, int>> cells;
  for (int h = 0; h <= n; ++h)
    for (int d = 1; d <= n; ++d) {
      if (h == d || !(edge(h, d - 1) >= 0.0)) continue;
      if (h == 0) g.add_top(d);
      else cells.emplace_back(h, d);
    }
  if (!cells.empty()) {
    const Vocab& labels = m.labels(Task::kSemantic);
    if (labels.size() == 0) throw std::invalid_argument("edge predicted but the model has no semantic labels");
    auto best = row_argmax(m.label_scores_at(t, p, Task::kSemantic, cells).value());
    for (std::size_t k = 0; k < cells.size(); ++k) g.add_edge(cells[k].first, cells[k].second, labels.str(best[k]));
  }
  return g;
}

SyntacticTree parse_syntactic(ParserModel& m, const EncodedSentence& in, const Sentence& s) {
  const int n = static_cast<int>(s.size());
  if (in.size() != n) throw std::invalid_argument("encoded input does not match the sentence");
  Tape t;
  const RunMode mode = RunMode::eval();
  Projections p = m.project(t, m.encode(t, m.embed(t, in, mode), Task::kSyntactic, mode), Task::kSyntactic, mode);
  const Matrix& edge = m.edge_scores(t, p, Task::kSyntactic).value();
  SyntacticTree tree;
  tree.tokens = s;
  std::vector<std::pair<int, int>> cells;
  for (int d = 1; d <= n; ++d) {
    int best = 0;
    for (int h = 1; h <= n; ++h)
      if (h != d && edge(h, d - 1) > edge(best, d - 1)) best = h;
    tree.heads.push_back(best);
    cells.emplace_back(best, d);
  }
  auto lab = row_argmax(m.label_scores_at(t, p, Task::kSyntactic, cells).value());
  for (int l : lab) tree.deprels.push_back(m.labels(Task::kSyntactic).str(l));
  if (!tree.well_formed()) tree.comments.push_back("# tree = no");
  return tree;
}

std::vector<SemanticGraph> parse_corpus(ParserModel& m, const std::vector<Sentence>& sentences,
                                        const std::vector<ContextMatrix>* context, int threads) {
  if (context && context->size() != sentences.size())
    throw std::invalid_argument("context vectors cover " + std::to_string(context->size()) + " sentences, corpus has " +
                                std::to_string(sentences.size()));
  std::vector<SemanticGraph> out(sentences.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < sentences.size() && !failed;) {
      try {
        EncodedSentence in = m.encode_input(sentences[i], context ? &(*context)[i] : nullptr);
        out[i] = parse_semantic(m, in, sentences[i]);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(sentences.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

SemanticGraph restrict_to_decided(const SemanticGraph& predicted, const PartialGraph& reference) {
  if (predicted.size() != reference.size()) throw std::invalid_argument("restrict_to_decided: length mismatch");
  SemanticGraph out(predicted.tokens);
  for (const auto& e : predicted.edges)
    if (reference.decided(e.head, e.dep)) out.add_edge(e.head, e.dep, e.label);
  return out;
}

// ---- batching ----------------------------------------------------------------------

std::vector<std::vector<std::size_t>> pack_batches(const std::vector<int>& lengths, const std::vector<std::size_t>& order,
                                                   int token_budget) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  int tokens = 0;
  for (std::size_t i : order) {
    const int n = lengths.at(i);
    if (!cur.empty() && tokens + n > token_budget) {
      out.push_back(std::move(cur));
      cur.clear();
      tokens = 0;
    }
    cur.push_back(i);
    tokens += n;
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<bool> interleave(std::size_t a, std::size_t b) {
  std::vector<bool> out;
  std::size_t i = 0, j = 0;
  while (i < a || j < b) {
    // Batch k of a task of size c sits at (2k + 1) / 2c.
    if (j == b || (i < a && (2 * i + 1) * b <= (2 * j + 1) * a)) {
      out.push_back(true);
      ++i;
    } else {
      out.push_back(false);
      ++j;
    }
  }
  return out;
}

// ---- trainer -----------------------------------------------------------------------

SemItem make_sem_item(const ParserModel& m, const PartialGraph& gold, const ContextMatrix* context) {
  return {m.encode_input(gold.graph.tokens, context), semantic_targets(gold, m.labels(Task::kSemantic))};
}

SynItem make_syn_item(const ParserModel& m, const SyntacticTree& gold) {
  return {m.encode_input(gold.tokens), syntactic_targets(gold, m.labels(Task::kSyntactic))};
}

Trainer::Trainer(ParserModel& model, TrainConfig cfg)
    : model_(model),
      cfg_(std::move(cfg)),
      sem_rng_(derive_seed(cfg_.seed, "dropout.sem")),
      syn_rng_(derive_seed(cfg_.seed, "dropout.syn")) {
  cfg_.validate();
}

Expr Trainer::sem_batch_loss(Tape& t, const std::vector<const SemItem*>& batch) {
  const RunMode mode{true, &sem_rng_, nullptr};
  Expr total;
  for (const SemItem* it : batch) {
    Projections p = model_.project(t, model_.encode(t, model_.embed(t, it->input, mode), Task::kSemantic, mode),
                                   Task::kSemantic, mode);
    Expr edge = model_.edge_scores(t, p, Task::kSemantic);
    Expr lab = it->targets.label_cells.empty() ? Expr()
                                               : model_.label_scores_at(t, p, Task::kSemantic, it->targets.label_cells);
    Expr l = semantic_loss(edge, lab, it->targets, cfg_.lambda_label);
    total = total.valid() ? total + l : l;
  }
  return total;
}

Expr Trainer::syn_batch_loss(Tape& t, const std::vector<const SynItem*>& batch) {
  const RunMode mode{true, &syn_rng_, nullptr};
  Expr total;
  for (const SynItem* it : batch) {
    Projections p = model_.project(t, model_.encode(t, model_.embed(t, it->input, mode), Task::kSyntactic, mode),
                                   Task::kSyntactic, mode);
    Expr edge = model_.edge_scores(t, p, Task::kSyntactic);
    Expr lab = model_.label_scores_at(t, p, Task::kSyntactic, it->targets.label_cells);
    Expr l = syntactic_loss(edge, lab, it->targets, cfg_.lambda_label);
    total = total.valid() ? total + l : l;
  }
  return total;
}

void Trainer::finish(Tape& t, const Expr& loss, const char* what) {
  if (!std::isfinite(loss.scalar())) {
    model_.params().zero_grad();
    throw std::runtime_error(std::string("training diverged: non-finite ") + what + " loss (" +
                             std::to_string(loss.scalar()) + ")");
  }
  t.backward(loss);
  for (const auto* p : model_.params().all())
    if (!p->grad.allFinite())
      throw std::runtime_error("training diverged: non-finite gradient in parameter '" + p->name + "'");
  ad::adam_step(model_.params().trainable(), cfg_.adam);
}

// Task weights only scale losses when the model actually has two tasks.
double Trainer::sem_step(const std::vector<const SemItem*>& batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  Tape t;
  Expr loss = sem_batch_loss(t, batch);
  const double w = model_.tasks().size() > 1 ? cfg_.omega_sem : 1.0;
  finish(t, ad::scale(loss, w), "semantic");
  return loss.scalar();
}

double Trainer::syn_step(const std::vector<const SynItem*>& batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  Tape t;
  Expr loss = syn_batch_loss(t, batch);
  const double w = model_.tasks().size() > 1 ? cfg_.omega_syn : 1.0;
  finish(t, ad::scale(loss, w), "syntactic");
  return loss.scalar();
}

std::pair<double, double> Trainer::combined_step(const std::vector<const SemItem*>& sem,
                                                 const std::vector<const SynItem*>& syn) {
  if (sem.empty() || syn.empty()) throw std::invalid_argument("empty batch");
  Tape t;
  Expr ls = sem_batch_loss(t, sem);
  Expr ly = syn_batch_loss(t, syn);
  finish(t, ad::scale(ls, cfg_.omega_sem) + ad::scale(ly, cfg_.omega_syn), "combined");
  return {ls.scalar(), ly.scalar()};
}

Expr Trainer::combined_loss(Tape& t, const std::vector<const SemItem*>& sem, const std::vector<const SynItem*>& syn) {
  return ad::scale(sem_batch_loss(t, sem), cfg_.omega_sem) + ad::scale(syn_batch_loss(t, syn), cfg_.omega_syn);
}

// ---- training loop -------------------------------------------------------------------

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

ScoreReport evaluate(ParserModel& m, const std::vector<EncodedSentence>& inputs, const std::vector<PartialGraph>& gold) {
  std::vector<SemanticGraph> pred, ref;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    pred.push_back(restrict_to_decided(parse_semantic(m, inputs[i], gold[i].graph.tokens), gold[i]));
    ref.push_back(gold[i].graph);
  }
  return score_graphs(pred, ref);
}

template <class Item>
std::vector<const Item*> gather(const std::vector<Item>& items, const std::vector<std::size_t>& idx) {
  std::vector<const Item*> out;
  for (std::size_t i : idx) out.push_back(&items[i]);
  return out;
}

}  // namespace

std::string format_epoch(const EpochRecord& r) {
  return "epoch=" + std::to_string(r.epoch) + " sem_loss=" + num(r.sem_loss) + " syn_loss=" + num(r.syn_loss) +
         " steps=" + std::to_string(r.steps) + " heldout_lf=" + num(r.heldout_lf) + " heldout_uf=" +
         num(r.heldout_uf) + " train_lf=" + num(r.train_lf);
}

TrainResult train(ParserModel& model, const TrainData& data, const TrainConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (!model.has_task(Task::kSemantic)) throw std::invalid_argument("model has no semantic task");
  if (data.sem_train.empty()) throw std::invalid_argument("empty semantic training corpus");
  if (data.sem_heldout.empty()) throw std::invalid_argument("empty heldout corpus");
  const bool multitask = model.has_task(Task::kSyntactic);
  if (multitask && data.syn_train.empty()) throw std::invalid_argument("multitask model needs a syntactic corpus");
  if (!multitask && !data.syn_train.empty()) throw std::invalid_argument("syntactic corpus given to a single-task model");
  auto check_ctx = [](const std::vector<ContextMatrix>& c, std::size_t n, const char* what) {
    if (!c.empty() && c.size() != n)
      throw std::invalid_argument(std::string(what) + " context vectors cover " + std::to_string(c.size()) +
                                  " sentences, corpus has " + std::to_string(n));
  };
  check_ctx(data.sem_train_context, data.sem_train.size(), "training");
  check_ctx(data.sem_heldout_context, data.sem_heldout.size(), "heldout");

  std::vector<SemItem> sem;
  std::vector<int> sem_len;
  for (std::size_t i = 0; i < data.sem_train.size(); ++i) {
    sem.push_back(make_sem_item(model, data.sem_train[i],
                                data.sem_train_context.empty() ? nullptr : &data.sem_train_context[i]));
    sem_len.push_back(data.sem_train[i].size());
  }
  std::vector<SynItem> syn;
  std::vector<int> syn_len;
  for (const auto& t : data.syn_train) {
    syn.push_back(make_syn_item(model, t));
    syn_len.push_back(t.size());
  }
  std::vector<EncodedSentence> held_in, train_in;
  for (std::size_t i = 0; i < data.sem_heldout.size(); ++i)
    held_in.push_back(model.encode_input(data.sem_heldout[i].graph.tokens,
                                         data.sem_heldout_context.empty() ? nullptr : &data.sem_heldout_context[i]));
  if (cfg.eval_train)
    for (const auto& it : sem) train_in.push_back(it.input);

  Trainer trainer(model, cfg);
  Rng sem_order(derive_seed(cfg.seed, "order.sem"));
  Rng syn_order(derive_seed(cfg.seed, "order.syn"));
  const bool use_syn = multitask && cfg.omega_syn > 0.0;

  TrainResult result;
  std::map<std::string, Matrix> best;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    std::vector<std::size_t> order(sem.size());
    std::iota(order.begin(), order.end(), 0);
    sem_order.shuffle(order);
    auto sem_batches = pack_batches(sem_len, order, cfg.token_budget);
    std::vector<std::vector<std::size_t>> syn_batches;
    if (use_syn) {
      std::vector<std::size_t> o(syn.size());
      std::iota(o.begin(), o.end(), 0);
      syn_order.shuffle(o);
      syn_batches = pack_batches(syn_len, o, cfg.token_budget);
    }
    if (!use_syn) {
      for (const auto& b : sem_batches) rec.sem_loss += trainer.sem_step(gather(sem, b));
      rec.steps = static_cast<int>(sem_batches.size());
    } else if (cfg.combined_step) {
      const std::size_t steps = std::max(sem_batches.size(), syn_batches.size());
      for (std::size_t k = 0; k < steps; ++k) {
        auto [ls, ly] = trainer.combined_step(gather(sem, sem_batches[k % sem_batches.size()]),
                                              gather(syn, syn_batches[k % syn_batches.size()]));
        rec.sem_loss += ls;
        rec.syn_loss += ly;
      }
      rec.steps = static_cast<int>(steps);
    } else {
      std::size_t i = 0, j = 0;
      for (bool is_sem : interleave(sem_batches.size(), syn_batches.size())) {
        if (is_sem) rec.sem_loss += trainer.sem_step(gather(sem, sem_batches[i++]));
        else rec.syn_loss += trainer.syn_step(gather(syn, syn_batches[j++]));
        ++rec.steps;
      }
    }
    ScoreReport held = evaluate(model, held_in, data.sem_heldout);
    rec.heldout_lf = held.lf;
    rec.heldout_uf = held.uf;
    if (cfg.eval_train) rec.train_lf = evaluate(model, train_in, data.sem_train).lf;
    result.epochs.push_back(rec);
    if (log) *log << format_epoch(rec) << '\n' << std::flush;

    if (held.lf > result.best_lf) {
      result.best_lf = held.lf;
      result.best_epoch = epoch;
      best = model.params().snapshot();
    }
    if (held.lf >= cfg.stop_lf) break;
    if (epoch - result.best_epoch >= cfg.patience) {
      result.stopped_early = true;
      break;
    }
  }
  model.params().restore(best);
  return result;
}

}  // namespace xsdp
