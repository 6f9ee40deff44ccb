#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "support/oracles.h"
#include "xsdp/network.h"
#include "xsdp/synth.h"

using namespace xsdp;

namespace {

NetworkConfig toy_net() {
  NetworkConfig n;
  n.word_dim = 6;
  n.pos_dim = 4;
  n.char_dim = 3;
  n.lstm_dim = 8;
  n.lstm_layers = 2;
  n.fnn_dim = 5;
  return n;
}

struct Fixture {
  SynthCorpus corpus;
  Vocabularies vocab;
  Fixture() {
    SynthConfig sc;
    sc.sentence_count = 8;
    corpus = synth_corpus(sc);
    vocab = build_vocabularies(corpus.gold_graphs, corpus.trees);
  }
};

Matrix value_of(const Expr& e) { return e.value(); }

}  // namespace

TEST_CASE("configuration checks") {
  NetworkConfig n = toy_net();
  CHECK_NOTHROW(n.validate());
  n.word_dim = 5;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
  n = toy_net();
  n.lstm_dim = 7;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
  n = toy_net();
  n.dropout.word = 1.0;
  CHECK_THROWS(n.validate());
  CHECK(toy_net().input_dim() == 10);

  CHECK(parse_sharing("rnn") == SharingTopology{true, false, false});
  CHECK(parse_sharing("rnn,fnn,taskrnn") == SharingTopology{true, true, true});
  CHECK(parse_sharing("none") == SharingTopology{false, false, false});
  CHECK(parse_sharing("") == SharingTopology{false, false, false});
  CHECK_THROWS(parse_sharing("rnn,bogus"));
  CHECK_THROWS(parse_sharing("taskrnn"));
  CHECK(format_sharing({true, true, false}) == "rnn,fnn");
  CHECK(parse_task("sem") == Task::kSemantic);
  CHECK(task_name(Task::kSyntactic) == "syn");
  CHECK_THROWS(parse_task("x"));
}

TEST_CASE("vocabularies: unknown at id 0, labels sorted, TOP excluded") {
  Fixture f;
  const Vocabularies& v = f.vocab;
  CHECK(v.words.str(0) == "<unk>");
  CHECK(v.words.find("surely-not-a-word") == std::nullopt);
  CHECK(v.words.id("surely-not-a-word") == 0);
  CHECK_FALSE(v.sem_labels.has_unk());
  CHECK_FALSE(v.sem_labels.find("TOP").has_value());
  auto items = v.sem_labels.items();
  CHECK(std::is_sorted(items.begin(), items.end()));
  CHECK(v.syn_labels.find("root").has_value());
  CHECK_THROWS(v.sem_labels.id("not-a-label"));
  CHECK(utf8_chars("př") == std::vector<std::string>{"p", "ř"});
}

TEST_CASE("score shapes for every sentence length") {
  Fixture f;
  for (bool bias : {false, true}) {
    NetworkConfig n = toy_net();
    n.biaffine_bias = bias;
    ParserModel m(n, {}, {Task::kSemantic, Task::kSyntactic}, f.vocab, 3);
    for (int len = 1; len <= 6; ++len) {
      Rng rng(static_cast<std::uint64_t>(len));
      Sentence s = testing::random_sentence(rng, len);
      for (Task task : {Task::kSemantic, Task::kSyntactic}) {
        ScoreValues sv = m.predict_scores(m.encode_input(s), task);
        CHECK(sv.edge.rows() == len + 1);
        CHECK(sv.edge.cols() == len);
        CHECK(sv.labels.size() == m.labels(task).size());
        for (const auto& l : sv.labels) {
          CHECK(l.rows() == len + 1);
          CHECK(l.cols() == len);
        }
      }
    }
  }
}

TEST_CASE("eval forward is deterministic and train mode depends on the rng") {
  Fixture f;
  ParserModel m(toy_net(), {}, {Task::kSemantic}, f.vocab, 4);
  const EncodedSentence in = m.encode_input(f.corpus.target_sentences[0]);
  ScoreValues a = m.predict_scores(in, Task::kSemantic);
  ScoreValues b = m.predict_scores(in, Task::kSemantic);
  CHECK(a.edge == b.edge);
  CHECK(a.labels == b.labels);

  auto train_edges = [&](std::uint64_t seed) {
    Tape t;
    Rng rng(seed);
    RunMode mode{true, &rng, nullptr};
    return value_of(m.forward(t, in, Task::kSemantic, mode).edge);
  };
  CHECK(train_edges(1) == train_edges(1));
  CHECK(train_edges(1) != train_edges(2));
  CHECK(train_edges(1) != a.edge);
}

TEST_CASE("forced word dropout substitutes the unknown rows") {
  Fixture f;
  NetworkConfig n = toy_net();
  ParserModel m(n, {}, {Task::kSemantic}, f.vocab, 5);
  const EncodedSentence in = m.encode_input(f.corpus.target_sentences[1]);
  const int len = in.size();
  InputDrop drop;
  drop.word.assign(static_cast<std::size_t>(len), 0);
  drop.pos.assign(static_cast<std::size_t>(len), 0);
  drop.word[0] = 1;
  drop.pos[1] = 1;
  Rng rng(1);
  Tape t;
  RunMode mode{true, &rng, &drop};
  Matrix x = m.embed(t, in, mode).value();
  Tape t2;
  Matrix clean = m.embed(t2, in, RunMode::eval()).value();
  const Matrix& uw = m.params().get("embed.word").value;
  const Matrix& up = m.params().get("embed.pos").value;
  CHECK(x.row(0).head(n.word_dim) == uw.row(0));
  CHECK(x.row(0).tail(n.pos_dim) == clean.row(0).tail(n.pos_dim));
  CHECK(x.row(1).tail(n.pos_dim) == up.row(0));
  CHECK(x.row(1).head(n.word_dim) == clean.row(1).head(n.word_dim));
  for (int r = 2; r < len; ++r) CHECK(x.row(r) == clean.row(r));
}

TEST_CASE("label scores at cells equal picks from the full label tensors") {
  Fixture f;
  ParserModel m(toy_net(), {}, {Task::kSemantic}, f.vocab, 6);
  const EncodedSentence in = m.encode_input(f.corpus.target_sentences[2]);
  Tape t;
  const RunMode mode = RunMode::eval();
  Expr states = m.encode(t, m.embed(t, in, mode), Task::kSemantic, mode);
  Projections p = m.project(t, states, Task::kSemantic, mode);
  auto full = m.label_scores(t, p, Task::kSemantic);
  std::vector<std::pair<int, int>> cells = {{0, 1}, {2, 1}, {1, 3}, {3, 2}};
  Matrix at = m.label_scores_at(t, p, Task::kSemantic, cells).value();
  REQUIRE(at.rows() == 4);
  REQUIRE(at.cols() == static_cast<Eigen::Index>(full.size()));
  for (std::size_t e = 0; e < cells.size(); ++e)
    for (std::size_t k = 0; k < full.size(); ++k)
      CHECK(at(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(k)) ==
            doctest::Approx(full[k].value()(cells[e].first, cells[e].second - 1)).epsilon(1e-12));
}

TEST_CASE("primary task layers initialize identically with and without an auxiliary task") {
  Fixture f;
  ParserModel single(toy_net(), {true, false, false}, {Task::kSemantic}, f.vocab, 9);
  ParserModel multi(toy_net(), {true, false, false}, {Task::kSemantic, Task::kSyntactic}, f.vocab, 9);
  for (const auto* p : single.params().all()) {
    REQUIRE(multi.params().contains(p->name));
    CHECK(multi.params().get(p->name).value == p->value);
  }
  CHECK(multi.params().contains("fnn.syn.edge_dep.w"));
  CHECK(multi.params().contains("biaf.syn.label"));
  CHECK_FALSE(multi.params().contains("rnn.syn.l0.fwd.wx"));
  ParserModel split(toy_net(), {false, false, false}, {Task::kSemantic, Task::kSyntactic}, f.vocab, 9);
  CHECK(split.params().contains("rnn.syn.l0.fwd.wx"));
  CHECK(split.rnn_prefix(Task::kSyntactic) == "rnn.syn");
  CHECK(multi.rnn_prefix(Task::kSyntactic) == "rnn");
  ParserModel task(toy_net(), {true, true, true}, {Task::kSemantic, Task::kSyntactic}, f.vocab, 9);
  CHECK(task.params().contains("taskrnn.sem.fwd.wx"));
  CHECK(task.fnn_prefix(Task::kSyntactic) == "fnn");
  CHECK_FALSE(task.params().get("embed.pretrained").trainable);
  CHECK(task.params().get("rnn.l0.fwd.b").value.row(0).segment(toy_net().lstm_dim / 2, toy_net().lstm_dim / 2).isOnes());
}

TEST_CASE("pretrained vectors are read and fixed") {
  const std::string path = "network_test_vectors.txt";
  std::ofstream(path) << "the 0.5 0.25 0 0 0 1\nkočka 1 1 1 1 1 1\n";
  PretrainedTable tab = read_pretrained(path, 6);
  CHECK(tab.words.size() == 3);
  CHECK(tab.vectors.row(0).isZero());
  CHECK(tab.vectors(static_cast<Eigen::Index>(*tab.words.find("the")), 0) == 0.5);
  CHECK_THROWS(read_pretrained(path, 5));
  Fixture f;
  ParserModel m(toy_net(), {}, {Task::kSemantic}, f.vocab, 2, &tab);
  CHECK(m.params().get("embed.pretrained").value == tab.vectors);
  CHECK(m.pretrained_words() == tab.words);
  EncodedSentence in = m.encode_input(make_sentence({"the", "dog"}));
  CHECK(in.pretrained == std::vector<int>{*tab.words.find("the"), 0});
  std::remove(path.c_str());
}

TEST_CASE("semantic decoding: sign rule, label ties, tops, diagonal") {
  Sentence s = make_sentence({"a", "b", "c"});
  Vocab labels = Vocab::from_items({"A", "B"}, false);
  Matrix edge(4, 3);
  edge << 0.0, -1, -1,  // row 0: top at 1 (boundary counts)
      5, -1, 2,         // 1 -> 1 is the diagonal, 1 -> 3
      -1e-9, 3, -4,     // 2 -> 2 diagonal
      -1, -1, -1;
  Matrix la = Matrix::Zero(4, 3), lb = Matrix::Zero(4, 3);
  lb(1, 2) = 1.0;  // 1 -> 3 is B
  // 1 -> 3 aside, every cell ties; lowest index A wins.
  SemanticGraph g = decode_semantic(edge, {la, lb}, labels, s);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0] == Edge{0, 1, "TOP"});
  CHECK(g.edges[1] == Edge{1, 3, "B"});
  CHECK(g.tokens == s);

  // Adding a constant to every slice does not change the argmax.
  SemanticGraph shifted = decode_semantic(edge, {la.array() + 7.0, lb.array() + 7.0}, labels, s);
  CHECK(shifted == g);
}

TEST_CASE("syntactic decoding: greedy heads and malformed trees") {
  Sentence s = make_sentence({"a", "b"});
  Vocab labels = Vocab::from_items({"root", "obj"}, false);
  Matrix edge(3, 2);
  edge << 1, 0,  //
      9, 1,      // 1 -> 1 self excluded; 1 -> 2
      1, 9;
  Matrix root = Matrix::Zero(3, 2), obj = Matrix::Ones(3, 2);
  root(0, 0) = 5;
  SyntacticTree t = decode_syntactic(edge, {root, obj}, labels, s);
  CHECK(t.heads == std::vector<int>{0, 1});
  CHECK(t.deprels == std::vector<std::string>{"root", "obj"});
  CHECK(t.well_formed());
  CHECK(t.comments.empty());

  Matrix tie(3, 2);
  tie << 1, 1, 1, 0, 1, 1;  // column 1 ties between heads 0 and 2
  SyntacticTree t2 = decode_syntactic(tie, {root, obj}, labels, s);
  CHECK(t2.heads[0] == 0);

  Matrix cyc(3, 2);
  cyc << 0, 0, 0, 5, 5, 0;
  SyntacticTree bad = decode_syntactic(cyc, {root, obj}, labels, s);
  CHECK(bad.heads == std::vector<int>{2, 1});
  CHECK_FALSE(bad.well_formed());
  CHECK(bad.comments == std::vector<std::string>{"# tree = no"});
}
