#include "xsdp/network.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace xsdp {

using ad::Init;
using ad::Parameter;

std::string_view task_name(Task t) { return t == Task::kSemantic ? "sem" : "syn"; }

Task parse_task(std::string_view s) {
  if (s == "sem") return Task::kSemantic;
  if (s == "syn") return Task::kSyntactic;
  throw std::invalid_argument("unknown task '" + std::string(s) + "' (expected sem or syn)");
}

void NetworkConfig::validate() const {
  auto positive = [](int v, const char* what) {
    if (v < 1) throw std::invalid_argument(std::string(what) + " must be positive");
  };
  positive(word_dim, "word_dim");
  positive(pos_dim, "pos_dim");
  positive(char_dim, "char_dim");
  positive(lstm_dim, "lstm_dim");
  positive(lstm_layers, "lstm_layers");
  positive(fnn_dim, "fnn_dim");
  if (context_dim < 0) throw std::invalid_argument("context_dim must be >= 0");
  if (word_dim % 2) throw std::invalid_argument("word_dim must be even (char BiLSTM has word_dim/2 units per direction)");
  if (lstm_dim % 2) throw std::invalid_argument("lstm_dim must be even (lstm_dim/2 units per direction)");
  for (double p : {dropout.word, dropout.pos, dropout.recurrent, dropout.edge_fnn, dropout.label_fnn})
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout rates must be in [0, 1)");
}

void SharingTopology::validate() const {
  if (task_rnn && !shared_rnn) throw std::invalid_argument("task RNN requires a shared RNN");
}

SharingTopology parse_sharing(std::string_view s) {
  SharingTopology t{false, false, false};
  if (s.empty() || s == "none") return t;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string_view::npos) end = s.size();
    auto item = s.substr(pos, end - pos);
    if (item == "rnn") t.shared_rnn = true;
    else if (item == "fnn") t.shared_fnn = true;
    else if (item == "taskrnn") t.task_rnn = true;
    else throw std::invalid_argument("unknown sharing option '" + std::string(item) + "' (expected rnn, fnn, taskrnn)");
    pos = end + 1;
  }
  t.validate();
  return t;
}

std::string format_sharing(const SharingTopology& t) {
  std::vector<std::string> parts;
  if (t.shared_rnn) parts.push_back("rnn");
  if (t.shared_fnn) parts.push_back("fnn");
  if (t.task_rnn) parts.push_back("taskrnn");
  if (parts.empty()) return "none";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += "," + parts[i];
  return out;
}

PretrainedTable read_pretrained(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pretrained vectors '" + path + "'");
  PretrainedTable t;
  std::vector<std::vector<double>> rows;
  rows.emplace_back(static_cast<std::size_t>(dim), 0.0);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::string word;
    ls >> word;
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (!ls.eof()) throw ParseError(line_no, "non-numeric value in pretrained vector");
    if (static_cast<int>(v.size()) != dim)
      throw ParseError(line_no, "pretrained vector has " + std::to_string(v.size()) + " values, expected " +
                                    std::to_string(dim));
    if (t.words.find(word)) continue;
    t.words.add(word);
    rows.push_back(std::move(v));
  }
  t.vectors = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < dim; ++c) t.vectors(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  return t;
}

Vocabularies build_vocabularies(const std::vector<SemanticGraph>& sem, const std::vector<SyntacticTree>& syn) {
  Vocabularies v;
  std::set<std::string> sem_labels, syn_labels;
  auto add_tokens = [&](const Sentence& s) {
    for (const auto& tok : s) {
      v.words.add(tok.form);
      v.pos.add(tok.pos);
      for (const auto& ch : utf8_chars(tok.form)) v.chars.add(ch);
    }
  };
  for (const auto& g : sem) {
    add_tokens(g.tokens);
    for (const auto& e : g.edges)
      if (e.head != 0) sem_labels.insert(e.label);
  }
  for (const auto& t : syn) {
    add_tokens(t.tokens);
    for (const auto& r : t.deprels) syn_labels.insert(r);
  }
  // Canonical label order is byte order; decoding ties go to the lower index.
  for (const auto& l : sem_labels) v.sem_labels.add(l);
  for (const auto& l : syn_labels) v.syn_labels.add(l);
  return v;
}

// ---- model construction ------------------------------------------------------------

namespace {

Parameter& get_or_add(ad::ParameterSet& ps, const std::string& name, int rows, int cols, Init init,
                      bool trainable = true) {
  if (ps.contains(name)) return ps.get(name);
  return ps.add(name, rows, cols, init, trainable);
}

}  // namespace

ParserModel::ParserModel(NetworkConfig cfg, SharingTopology topo, std::vector<Task> tasks, Vocabularies vocab,
                         std::uint64_t seed, const PretrainedTable* pretrained)
    : cfg_(cfg), topo_(topo), tasks_(std::move(tasks)), vocab_(std::move(vocab)), seed_(seed), params_(seed) {
  cfg_.validate();
  topo_.validate();
  if (tasks_.empty()) throw std::invalid_argument("model needs at least one task");
  if (tasks_.size() > 2 || (tasks_.size() == 2 && tasks_[0] == tasks_[1]))
    throw std::invalid_argument("tasks must be distinct");

  params_.add("embed.word", vocab_.words.size(), cfg_.word_dim, Init::kEmbedding);
  params_.add("embed.pos", vocab_.pos.size(), cfg_.pos_dim, Init::kEmbedding);
  params_.add("embed.char", vocab_.chars.size(), cfg_.char_dim, Init::kEmbedding);
  params_.add("embed.root", 1, cfg_.input_dim(), Init::kEmbedding);
  if (pretrained) {
    if (pretrained->vectors.cols() != cfg_.word_dim)
      throw std::invalid_argument("pretrained vectors have dimension " + std::to_string(pretrained->vectors.cols()) +
                                  ", word_dim is " + std::to_string(cfg_.word_dim));
    if (pretrained->vectors.rows() != pretrained->words.size())
      throw std::invalid_argument("pretrained table rows disagree with its vocabulary");
    pretrained_words_ = pretrained->words;
  }
  Parameter& pe = params_.add("embed.pretrained", pretrained_words_.size(), cfg_.word_dim, Init::kZero, false);
  if (pretrained) {
    pe.value = pretrained->vectors;
    pe.value.row(0).setZero();
  }
  char_rnn_ = make_bilstm("char", cfg_.char_dim, cfg_.word_dim / 2);

  const int h = cfg_.lstm_dim / 2;
  const int d = cfg_.fnn_dim + (cfg_.biaffine_bias ? 1 : 0);
  for (Task task : tasks_) {
    TaskLayers tl;
    const std::string rp = rnn_prefix(task);
    for (int l = 0; l < cfg_.lstm_layers; ++l)
      tl.rnn.push_back(make_bilstm(rp + ".l" + std::to_string(l), l == 0 ? cfg_.input_dim() : cfg_.lstm_dim, h));
    if (topo_.task_rnn) tl.task_rnn = make_bilstm("taskrnn." + std::string(task_name(task)), cfg_.lstm_dim, h);
    const std::string fp = fnn_prefix(task);
    tl.edge_dep = make_fnn(fp + ".edge_dep", cfg_.lstm_dim, cfg_.fnn_dim);
    tl.edge_head = make_fnn(fp + ".edge_head", cfg_.lstm_dim, cfg_.fnn_dim);
    tl.label_dep = make_fnn(fp + ".label_dep", cfg_.lstm_dim, cfg_.fnn_dim);
    tl.label_head = make_fnn(fp + ".label_head", cfg_.lstm_dim, cfg_.fnn_dim);
    const std::string bp = "biaf." + std::string(task_name(task));
    tl.w_edge = &params_.add(bp + ".edge", d, d, Init::kGlorot);
    const int n_labels = labels(task).size();
    tl.w_label = n_labels > 0 ? &params_.add(bp + ".label", n_labels * d, d, Init::kGlorot) : nullptr;
    task_layers_.push_back(std::move(tl));
  }
}

ParserModel::Lstm ParserModel::make_lstm(const std::string& name, int in, int hidden) {
  Lstm l;
  l.wx = &get_or_add(params_, name + ".wx", in, 4 * hidden, Init::kGlorot);
  l.wh = &get_or_add(params_, name + ".wh", hidden, 4 * hidden, Init::kGlorot);
  const bool fresh = !params_.contains(name + ".b");
  l.b = &get_or_add(params_, name + ".b", 1, 4 * hidden, Init::kZero);
  if (fresh) l.b->value.block(0, hidden, 1, hidden).setOnes();  // forget gate
  l.hidden = hidden;
  return l;
}

ParserModel::BiLstm ParserModel::make_bilstm(const std::string& name, int in, int hidden) {
  return {make_lstm(name + ".fwd", in, hidden), make_lstm(name + ".bwd", in, hidden)};
}

ParserModel::Fnn ParserModel::make_fnn(const std::string& name, int in, int out) {
  return {&get_or_add(params_, name + ".w", in, out, Init::kGlorot),
          &get_or_add(params_, name + ".b", 1, out, Init::kZero)};
}

std::string ParserModel::task_suffix(Task t) const {
  return t == tasks_[0] ? std::string() : "." + std::string(task_name(t));
}

std::string ParserModel::rnn_prefix(Task t) const { return topo_.shared_rnn ? "rnn" : "rnn" + task_suffix(t); }
std::string ParserModel::fnn_prefix(Task t) const { return topo_.shared_fnn ? "fnn" : "fnn" + task_suffix(t); }

bool ParserModel::has_task(Task t) const { return std::find(tasks_.begin(), tasks_.end(), t) != tasks_.end(); }

const ParserModel::TaskLayers& ParserModel::layers(Task t) const {
  for (std::size_t i = 0; i < tasks_.size(); ++i)
    if (tasks_[i] == t) return task_layers_[i];
  throw std::invalid_argument("model has no " + std::string(task_name(t)) + " task");
}

// ---- forward ------------------------------------------------------------------------

EncodedSentence ParserModel::encode_input(const Sentence& s, const ContextMatrix* context) const {
  EncodedSentence e;
  std::map<std::string, int> form_index;
  for (const auto& tok : s) {
    e.words.push_back(vocab_.words.id(tok.form));
    e.pretrained.push_back(pretrained_words_.id(tok.form));
    e.pos.push_back(vocab_.pos.id(tok.pos));
    auto [it, inserted] = form_index.emplace(tok.form, static_cast<int>(e.forms.size()));
    if (inserted) {
      std::vector<int> ids;
      for (const auto& ch : utf8_chars(tok.form)) ids.push_back(vocab_.chars.id(ch));
      e.forms.push_back(std::move(ids));
    }
    e.form_of.push_back(it->second);
  }
  if (context) e.context = *context;
  return e;
}

namespace {

struct LstmState {
  Expr h, c;
};

// One LSTM step from precomputed input projections (gate order i, f, o, u).
LstmState lstm_step(const Expr& xw, const Expr& wh, const LstmState* prev, int hidden) {
  Expr g = prev ? xw + prev->h * wh : xw;
  Expr sig = ad::sigmoid(ad::slice_cols(g, 0, 3 * hidden));
  Expr i = ad::slice_cols(sig, 0, hidden);
  Expr f = ad::slice_cols(sig, hidden, hidden);
  Expr o = ad::slice_cols(sig, 2 * hidden, hidden);
  Expr u = ad::tanh(ad::slice_cols(g, 3 * hidden, hidden));
  Expr c = prev ? ad::cmult(f, prev->c) + ad::cmult(i, u) : ad::cmult(i, u);
  return {ad::cmult(o, ad::tanh(c)), c};
}

Matrix row_mask(const std::vector<char>& drop, Eigen::Index cols, bool dropped_value) {
  Matrix m(static_cast<Eigen::Index>(drop.size()), cols);
  for (std::size_t r = 0; r < drop.size(); ++r)
    m.row(static_cast<Eigen::Index>(r)).setConstant((drop[r] != 0) == dropped_value ? 1.0 : 0.0);
  return m;
}

}  // namespace

Expr ParserModel::run_lstm(Tape& t, const Lstm& l, const Expr& x, bool reverse) {
  Expr xw = x * t.param(*l.wx) + t.param(*l.b);
  Expr wh = t.param(*l.wh);
  const int n = static_cast<int>(x.rows());
  std::vector<Expr> hs(static_cast<std::size_t>(n));
  std::optional<LstmState> st;
  for (int s = 0; s < n; ++s) {
    const int idx = reverse ? n - 1 - s : s;
    st = lstm_step(ad::slice_rows(xw, idx, 1), wh, st ? &*st : nullptr, l.hidden);
    hs[static_cast<std::size_t>(idx)] = st->h;
  }
  return ad::concat_rows(hs);
}

Expr ParserModel::run_bilstm(Tape& t, const BiLstm& l, const Expr& x) {
  return ad::concat_cols({run_lstm(t, l.fwd, x, false), run_lstm(t, l.bwd, x, true)});
}

// Final forward and backward states of the char BiLSTM for every distinct
// form, all forms batched per step. Sequences are left-padded so every form
// ends on the last step; padded steps are held at the zero state.
Expr ParserModel::char_features(Tape& t, const EncodedSentence& s) {
  const int F = static_cast<int>(s.forms.size());
  int T = 0;
  for (const auto& f : s.forms) T = std::max(T, static_cast<int>(f.size()));
  const int hc = cfg_.word_dim / 2;
  if (T == 0) return t.constant(Matrix::Zero(F, cfg_.word_dim));

  std::vector<Expr> finals;
  for (int dir = 0; dir < 2; ++dir) {
    const Lstm& l = dir == 0 ? char_rnn_.fwd : char_rnn_.bwd;
    std::vector<int> ids(static_cast<std::size_t>(T * F), Vocab::kUnk);
    for (int f = 0; f < F; ++f) {
      const auto& chars = s.forms[static_cast<std::size_t>(f)];
      const int L = static_cast<int>(chars.size());
      for (int k = 0; k < L; ++k) {
        const int c = dir == 0 ? chars[static_cast<std::size_t>(k)] : chars[static_cast<std::size_t>(L - 1 - k)];
        ids[static_cast<std::size_t>((T - L + k) * F + f)] = c;
      }
    }
    Expr xw = ad::lookup(t, params_.get("embed.char"), ids) * t.param(*l.wx) + t.param(*l.b);
    Expr wh = t.param(*l.wh);
    std::optional<LstmState> st;
    for (int step = 0; step < T; ++step) {
      std::vector<char> active(static_cast<std::size_t>(F));
      bool all = true;
      for (int f = 0; f < F; ++f) {
        active[static_cast<std::size_t>(f)] = static_cast<int>(s.forms[static_cast<std::size_t>(f)].size()) >= T - step;
        all = all && active[static_cast<std::size_t>(f)];
      }
      LstmState next = lstm_step(ad::slice_rows(xw, step * F, F), wh, st ? &*st : nullptr, l.hidden);
      if (!all) {
        Expr m = t.constant(row_mask(active, hc, true));
        next = {ad::cmult(next.h, m), ad::cmult(next.c, m)};
      }
      st = next;
    }
    finals.push_back(st->h);
  }
  return ad::concat_cols(finals);
}

Expr ParserModel::embed(Tape& t, const EncodedSentence& s, const RunMode& mode) {
  const int n = s.size();
  if (n < 1) throw std::invalid_argument("cannot embed an empty sentence");
  if (mode.train && !mode.forced_drop && !mode.rng) throw std::invalid_argument("train mode needs an Rng");

  Expr we = ad::lookup(t, params_.get("embed.word"), s.words) +
            ad::lookup(t, params_.get("embed.pretrained"), s.pretrained) +
            ad::select_rows(char_features(t, s), s.form_of);
  Expr te = ad::lookup(t, params_.get("embed.pos"), s.pos);

  InputDrop drop;
  if (mode.forced_drop) {
    drop = *mode.forced_drop;
    if (static_cast<int>(drop.word.size()) != n || static_cast<int>(drop.pos.size()) != n)
      throw std::invalid_argument("forced dropout mask length differs from sentence length");
  } else {
    drop.word.assign(static_cast<std::size_t>(n), 0);
    drop.pos.assign(static_cast<std::size_t>(n), 0);
    if (mode.train) {
      for (auto& d : drop.word) d = mode.rng->bernoulli(cfg_.dropout.word);
      for (auto& d : drop.pos) d = mode.rng->bernoulli(cfg_.dropout.pos);
    }
  }
  auto replace = [&](Expr x, const std::vector<char>& flags, const char* table) {
    if (std::none_of(flags.begin(), flags.end(), [](char c) { return c != 0; })) return x;
    Expr unk = ad::lookup(t, params_.get(table), std::vector<int>(static_cast<std::size_t>(n), Vocab::kUnk));
    return ad::cmult(x, t.constant(row_mask(flags, x.cols(), false))) +
           ad::cmult(unk, t.constant(row_mask(flags, x.cols(), true)));
  };
  we = replace(we, drop.word, "embed.word");
  te = replace(te, drop.pos, "embed.pos");

  std::vector<Expr> parts = {we, te};
  if (cfg_.context_dim > 0) {
    if (s.context.rows() != n || s.context.cols() != cfg_.context_dim)
      throw std::invalid_argument("context vectors are " + std::to_string(s.context.rows()) + "x" +
                                  std::to_string(s.context.cols()) + ", expected " + std::to_string(n) + "x" +
                                  std::to_string(cfg_.context_dim));
    parts.push_back(t.constant(s.context));
  } else if (s.context.size() > 0) {
    throw std::invalid_argument("context vectors given but the model has context_dim 0");
  }
  return ad::concat_cols(parts);
}

Expr ParserModel::encode(Tape& t, const Expr& embedded, Task task, const RunMode& mode) {
  const TaskLayers& tl = layers(task);
  Expr x = ad::concat_rows({t.param(params_.get("embed.root")), embedded});
  auto drop = [&](const Expr& e) {
    return mode.train && cfg_.dropout.recurrent > 0 ? ad::dropout(e, cfg_.dropout.recurrent, *mode.rng) : e;
  };
  for (std::size_t l = 0; l < tl.rnn.size(); ++l) x = run_bilstm(t, tl.rnn[l], l == 0 ? x : drop(x));
  if (tl.task_rnn) x = run_bilstm(t, *tl.task_rnn, drop(x));
  return x;
}

Expr ParserModel::apply_fnn(Tape& t, const Fnn& f, const Expr& x, double drop, const RunMode& mode) {
  Expr h = ad::tanh(x * t.param(*f.w) + t.param(*f.b));
  if (mode.train && drop > 0) h = ad::dropout(h, drop, *mode.rng);
  if (cfg_.biaffine_bias) h = ad::concat_cols({h, t.constant(Matrix::Ones(h.rows(), 1))});
  return h;
}

Projections ParserModel::project(Tape& t, const Expr& states, Task task, const RunMode& mode) {
  const TaskLayers& tl = layers(task);
  const auto& d = cfg_.dropout;
  return {apply_fnn(t, tl.edge_dep, states, d.edge_fnn, mode), apply_fnn(t, tl.edge_head, states, d.edge_fnn, mode),
          apply_fnn(t, tl.label_dep, states, d.label_fnn, mode),
          apply_fnn(t, tl.label_head, states, d.label_fnn, mode)};
}

Expr ParserModel::edge_scores(Tape& t, const Projections& p, Task task) {
  const int n = static_cast<int>(p.edge_dep.rows()) - 1;
  return ad::bilinear(p.edge_head, t.param(*layers(task).w_edge), ad::slice_rows(p.edge_dep, 1, n));
}

std::vector<Expr> ParserModel::label_scores(Tape& t, const Projections& p, Task task) {
  const TaskLayers& tl = layers(task);
  std::vector<Expr> out;
  if (!tl.w_label) return out;
  const int n = static_cast<int>(p.label_dep.rows()) - 1;
  const int d = static_cast<int>(p.label_dep.cols());
  Expr w = t.param(*tl.w_label);
  Expr deps = ad::slice_rows(p.label_dep, 1, n);
  for (int l = 0; l < labels(task).size(); ++l)
    out.push_back(ad::bilinear(p.label_head, ad::slice_rows(w, l * d, d), deps));
  return out;
}

Expr ParserModel::label_scores_at(Tape& t, const Projections& p, Task task,
                                  const std::vector<std::pair<int, int>>& cells) {
  const TaskLayers& tl = layers(task);
  if (!tl.w_label) throw std::invalid_argument("task has no labels");
  if (cells.empty()) throw std::invalid_argument("label_scores_at: no cells");
  const int L = labels(task).size();
  const int d = static_cast<int>(p.label_dep.cols());
  std::vector<int> heads, deps;
  for (const auto& [h, dep] : cells) {
    if (dep < 1 || dep >= p.label_dep.rows() || h < 0 || h >= p.label_head.rows())
      throw std::out_of_range("label cell outside the sentence");
    heads.push_back(h);
    deps.push_back(dep);
  }
  Expr hs = ad::select_rows(p.label_head, heads);
  Expr ds = ad::select_rows(p.label_dep, deps);
  // q[e, l*d + a] = (W_l d_e)_a; the score is the per-block dot product with h_e.
  Expr q = ds * ad::transpose(t.param(*tl.w_label));
  Expr tiled = ad::concat_cols(std::vector<Expr>(static_cast<std::size_t>(L), hs));
  Matrix blocks = Matrix::Zero(static_cast<Eigen::Index>(L) * d, L);
  for (int l = 0; l < L; ++l) blocks.block(static_cast<Eigen::Index>(l) * d, l, d, 1).setOnes();
  return ad::cmult(tiled, q) * t.constant(std::move(blocks));
}

TaskScores ParserModel::forward(Tape& t, const EncodedSentence& s, Task task, const RunMode& mode) {
  Expr states = encode(t, embed(t, s, mode), task, mode);
  Projections p = project(t, states, task, mode);
  return {edge_scores(t, p, task), label_scores(t, p, task)};
}

ScoreValues ParserModel::predict_scores(const EncodedSentence& s, Task task) {
  Tape t;
  TaskScores sc = forward(t, s, task, RunMode::eval());
  ScoreValues out;
  out.edge = sc.edge.value();
  for (const auto& l : sc.labels) out.labels.push_back(l.value());
  return out;
}

Matrix ParserModel::states(const EncodedSentence& s, Task task) {
  Tape t;
  return encode(t, embed(t, s, RunMode::eval()), task, RunMode::eval()).value();
}

// ---- decoding -------------------------------------------------------------------------

namespace {

int argmax_label(const std::vector<Matrix>& labels, int h, int col) {
  int best = 0;
  for (int l = 1; l < static_cast<int>(labels.size()); ++l)
    if (labels[static_cast<std::size_t>(l)](h, col) > labels[static_cast<std::size_t>(best)](h, col)) best = l;
  return best;
}

void check_scores(const Matrix& edge, const std::vector<Matrix>& labels, int n, const char* what) {
  if (edge.rows() != n + 1 || edge.cols() != n)
    throw std::invalid_argument(std::string(what) + ": edge scores do not match sentence length");
  for (const auto& m : labels)
    if (m.rows() != n + 1 || m.cols() != n)
      throw std::invalid_argument(std::string(what) + ": label scores do not match sentence length");
}

}  // namespace

SemanticGraph decode_semantic(const Matrix& edge, const std::vector<Matrix>& labels, const Vocab& label_vocab,
                              const Sentence& sentence) {
  const int n = static_cast<int>(sentence.size());
  check_scores(edge, labels, n, "decode_semantic");
  if (static_cast<int>(labels.size()) != label_vocab.size())
    throw std::invalid_argument("decode_semantic: label slices disagree with the label set");
  SemanticGraph g(sentence);
  for (int h = 0; h <= n; ++h) {
    for (int d = 1; d <= n; ++d) {
      if (h == d || !(edge(h, d - 1) >= 0.0)) continue;
      if (h == 0) {
        g.add_top(d);
      } else {
        if (labels.empty()) throw std::invalid_argument("decode_semantic: edge predicted but no labels");
        g.add_edge(h, d, label_vocab.str(argmax_label(labels, h, d - 1)));
      }
    }
  }
  return g;
}

SyntacticTree decode_syntactic(const Matrix& edge, const std::vector<Matrix>& labels, const Vocab& label_vocab,
                               const Sentence& sentence) {
  const int n = static_cast<int>(sentence.size());
  check_scores(edge, labels, n, "decode_syntactic");
  if (labels.empty() || static_cast<int>(labels.size()) != label_vocab.size())
    throw std::invalid_argument("decode_syntactic: label slices disagree with the label set");
  SyntacticTree t;
  t.tokens = sentence;
  for (int d = 1; d <= n; ++d) {
    int best = 0;
    for (int h = 1; h <= n; ++h)
      if (h != d && edge(h, d - 1) > edge(best, d - 1)) best = h;
    t.heads.push_back(best);
    t.deprels.push_back(label_vocab.str(argmax_label(labels, best, d - 1)));
  }
  if (!t.well_formed()) t.comments.push_back("# tree = no");
  return t;
}

}  // namespace xsdp
