#ifndef XSDP_NETWORK_H_
#define XSDP_NETWORK_H_

// Biaffine graph parser: summed word embeddings (random + fixed pretrained +
// char BiLSTM) concatenated with POS and optional context vectors, a deep
// BiLSTM over a root-prefixed sequence, four tanh FNN projections and
// bilinear edge / label scorers per task.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xsdp/autodiff.h"
#include "xsdp/formats.h"
#include "xsdp/graph.h"
#include "xsdp/rng.h"
#include "xsdp/vocab.h"

namespace xsdp {

using ad::Expr;
using ad::Matrix;
using ad::Tape;

enum class Task { kSemantic = 0, kSyntactic = 1 };
std::string_view task_name(Task t);  // "sem" / "syn"
Task parse_task(std::string_view s);

struct DropoutConfig {
  double word = 0.2;
  double pos = 0.2;
  double recurrent = 0.25;
  double edge_fnn = 0.25;
  double label_fnn = 0.33;
  bool operator==(const DropoutConfig&) const = default;
};

struct NetworkConfig {
  int word_dim = 100;   // d_w; the char BiLSTM has word_dim/2 units per direction
  int pos_dim = 100;    // d_t
  int char_dim = 50;    // char embedding size
  int lstm_dim = 600;   // concatenated BiLSTM output, lstm_dim/2 per direction
  int lstm_layers = 3;
  int fnn_dim = 600;
  int context_dim = 0;  // 0 disables the context-vector channel
  bool biaffine_bias = false;
  DropoutConfig dropout;

  int input_dim() const { return word_dim + pos_dim + context_dim; }
  void validate() const;  // throws std::invalid_argument
  bool operator==(const NetworkConfig&) const = default;
};

struct SharingTopology {
  bool shared_rnn = true;
  bool shared_fnn = false;
  bool task_rnn = false;
  void validate() const;
  bool operator==(const SharingTopology&) const = default;
};

// Parses "rnn,fnn,taskrnn" (any subset; "none" or empty for no sharing).
SharingTopology parse_sharing(std::string_view s);
std::string format_sharing(const SharingTopology& t);

struct PretrainedTable {
  Vocab words{true};   // row 0 is the unknown word (zero vector)
  Matrix vectors;      // words.size() x dim
};
// Text format: one "word v1 ... vd" line per word.
PretrainedTable read_pretrained(const std::string& path, int dim);

struct Vocabularies {
  Vocab words{true};
  Vocab chars{true};
  Vocab pos{true};
  Vocab sem_labels{false};  // TOP excluded: row-0 edges decode as TOP
  Vocab syn_labels{false};
  bool operator==(const Vocabularies&) const = default;
};

Vocabularies build_vocabularies(const std::vector<SemanticGraph>& sem, const std::vector<SyntacticTree>& syn);

struct EncodedSentence {
  std::vector<int> words;
  std::vector<int> pretrained;
  std::vector<int> pos;
  std::vector<std::vector<int>> forms;  // distinct forms as char ids
  std::vector<int> form_of;             // token -> index into forms
  Matrix context;                       // n x context_dim, empty when unused
  int size() const { return static_cast<int>(words.size()); }
};

// Word / POS dropout decisions, one flag per token (1 = replaced by unknown).
struct InputDrop {
  std::vector<char> word;
  std::vector<char> pos;
};

struct RunMode {
  bool train = false;
  Rng* rng = nullptr;                      // required when train is set
  const InputDrop* forced_drop = nullptr;  // overrides sampled input dropout
  static RunMode eval() { return {}; }
};

struct TaskScores {
  Expr edge;                // (n+1) x n, heads x dependents
  std::vector<Expr> labels; // one (n+1) x n matrix per label
};

// FNN projections of the recurrent states for one task.
struct Projections {
  Expr edge_dep, edge_head, label_dep, label_head;  // (n+1) x d each
};

struct ScoreValues {
  Matrix edge;                // (n+1) x n
  std::vector<Matrix> labels; // per label
};

class ParserModel {
 public:
  // tasks[0] is the primary task; its private layers carry the base names so a
  // single-task model and the primary side of a multitask model initialize
  // identically under the same seed.
  ParserModel(NetworkConfig cfg, SharingTopology topo, std::vector<Task> tasks, Vocabularies vocab,
              std::uint64_t seed, const PretrainedTable* pretrained = nullptr);
  ParserModel(const ParserModel&) = delete;
  ParserModel& operator=(const ParserModel&) = delete;

  EncodedSentence encode_input(const Sentence& s, const ContextMatrix* context = nullptr) const;

  Expr embed(Tape& t, const EncodedSentence& s, const RunMode& mode);
  // Root row prepended: (n+1) x lstm_dim.
  Expr encode(Tape& t, const Expr& embedded, Task task, const RunMode& mode);
  Projections project(Tape& t, const Expr& states, Task task, const RunMode& mode);
  Expr edge_scores(Tape& t, const Projections& p, Task task);
  std::vector<Expr> label_scores(Tape& t, const Projections& p, Task task);
  // E x L label scores at (head, dep) cells; equals picking from label_scores.
  Expr label_scores_at(Tape& t, const Projections& p, Task task, const std::vector<std::pair<int, int>>& cells);

  TaskScores forward(Tape& t, const EncodedSentence& s, Task task, const RunMode& mode);
  // Eval-mode scores as plain matrices.
  ScoreValues predict_scores(const EncodedSentence& s, Task task);
  // Eval-mode recurrent states (for sharing checks).
  Matrix states(const EncodedSentence& s, Task task);

  bool has_task(Task t) const;
  const std::vector<Task>& tasks() const { return tasks_; }
  const NetworkConfig& config() const { return cfg_; }
  const SharingTopology& topology() const { return topo_; }
  const Vocabularies& vocab() const { return vocab_; }
  const Vocab& labels(Task t) const { return t == Task::kSemantic ? vocab_.sem_labels : vocab_.syn_labels; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const Vocab& pretrained_words() const { return pretrained_words_; }

  // Layer-name prefixes used by the task (embedding excluded).
  std::string rnn_prefix(Task t) const;
  std::string fnn_prefix(Task t) const;

 private:
  struct Lstm {
    ad::Parameter* wx;
    ad::Parameter* wh;
    ad::Parameter* b;
    int hidden;
  };
  struct BiLstm {
    Lstm fwd, bwd;
  };
  struct Fnn {
    ad::Parameter* w;
    ad::Parameter* b;
  };
  struct TaskLayers {
    std::vector<BiLstm> rnn;
    std::optional<BiLstm> task_rnn;
    Fnn edge_dep, edge_head, label_dep, label_head;
    ad::Parameter* w_edge;
    ad::Parameter* w_label;
  };

  Lstm make_lstm(const std::string& name, int in, int hidden);
  BiLstm make_bilstm(const std::string& name, int in, int hidden);
  Fnn make_fnn(const std::string& name, int in, int out);
  std::string task_suffix(Task t) const;
  const TaskLayers& layers(Task t) const;

  Expr run_lstm(Tape& t, const Lstm& l, const Expr& x, bool reverse);
  Expr run_bilstm(Tape& t, const BiLstm& l, const Expr& x);
  Expr char_features(Tape& t, const EncodedSentence& s);
  Expr apply_fnn(Tape& t, const Fnn& f, const Expr& x, double drop, const RunMode& mode);

  NetworkConfig cfg_;
  SharingTopology topo_;
  std::vector<Task> tasks_;
  Vocabularies vocab_;
  std::uint64_t seed_;
  Vocab pretrained_words_{true};
  ad::ParameterSet params_;
  BiLstm char_rnn_{};
  std::vector<TaskLayers> task_layers_;  // indexed like tasks_
};

// Sign decoding: edge iff score >= 0, label by argmax (lowest index on ties),
// row-0 edges become tops. Diagonal cells never produce edges.
SemanticGraph decode_semantic(const Matrix& edge, const std::vector<Matrix>& labels, const Vocab& label_vocab,
                              const Sentence& sentence);
// Greedy head per column (lowest index on ties, self excluded), label at the head.
SyntacticTree decode_syntactic(const Matrix& edge, const std::vector<Matrix>& labels, const Vocab& label_vocab,
                               const Sentence& sentence);

}  // namespace xsdp

#endif  // XSDP_NETWORK_H_
