#include "xsdp/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "xsdp/rng.h"

namespace xsdp {

namespace {

struct PosClass {
  const char* tag;
  int rank;
  double weight;
  const char* suffix;
};

constexpr std::array<PosClass, 7> kClasses = {{
    {"VERB", 4, 0.15, "ti"},
    {"NOUN", 3, 0.30, "a"},
    {"ADP", 2, 0.10, ""},
    {"ADJ", 1, 0.15, "ny"},
    {"ADV", 1, 0.08, "e"},
    {"DET", 0, 0.12, ""},
    {"NUM", 0, 0.10, "st"},
}};
constexpr int kNumClasses = static_cast<int>(kClasses.size());

struct Word {
  std::string form;
  bool raising = false;
};

// The seeded synthetic language: lexicon plus label tables.
struct Language {
  std::vector<std::vector<Word>> lexicon;  // per class
  // [head class][dep class][dep left of head]
  std::vector<std::string> label;
  std::vector<std::string> raised_label;  // [grandparent class][dep class]

  const std::string& edge_label(int hc, int dc, bool left) const {
    return label[static_cast<std::size_t>((hc * kNumClasses + dc) * 2 + (left ? 1 : 0))];
  }
  const std::string& raise_label(int gc, int dc) const {
    return raised_label[static_cast<std::size_t>(gc * kNumClasses + dc)];
  }
};

Language make_language(const SynthConfig& cfg, Rng& rng) {
  static const std::string kCons = "bcdfghjklmnprstv";
  static const std::string kVow = "aeiou";
  Language lang;
  std::unordered_set<std::string> seen;
  lang.lexicon.resize(kNumClasses);
  for (int c = 0; c < kNumClasses; ++c) {
    auto& words = lang.lexicon[static_cast<std::size_t>(c)];
    while (static_cast<int>(words.size()) < cfg.words_per_class) {
      Word w;
      w.raising = rng.bernoulli(1.0 - cfg.syntactic_agreement);
      std::string form = w.raising ? "z" : "";
      const int syll = rng.range(1, 3);
      for (int s = 0; s < syll; ++s) {
        form += kCons[rng.index(kCons.size())];
        form += kVow[rng.index(kVow.size())];
      }
      form += kClasses[static_cast<std::size_t>(c)].suffix;
      if (!seen.insert(form).second) continue;
      w.form = std::move(form);
      words.push_back(std::move(w));
    }
  }
  const std::size_t L = cfg.labels.size();
  for (int k = 0; k < kNumClasses * kNumClasses * 2; ++k) lang.label.push_back(cfg.labels[rng.index(L)]);
  for (int k = 0; k < kNumClasses * kNumClasses; ++k)
    lang.raised_label.push_back(cfg.labels[rng.index(L)]);
  return lang;
}

int draw_class(Rng& rng) {
  double u = rng.uniform();
  for (int c = 0; c < kNumClasses; ++c) {
    u -= kClasses[static_cast<std::size_t>(c)].weight;
    if (u < 0) return c;
  }
  return kNumClasses - 1;
}

std::string deprel_for(int hc, int dc, bool left, bool is_root) {
  if (is_root) return "root";
  const std::string_view h = kClasses[static_cast<std::size_t>(hc)].tag;
  const std::string_view d = kClasses[static_cast<std::size_t>(dc)].tag;
  if (d == "NOUN") {
    if (h == "VERB") return left ? "nsubj" : "obj";
    if (h == "ADP") return "obl";
    return "nmod";
  }
  if (d == "VERB") return "conj";
  if (d == "ADP") return "case";
  if (d == "ADJ") return "amod";
  if (d == "ADV") return "advmod";
  if (d == "DET") return "det";
  if (d == "NUM") return "nummod";
  return "dep";
}

// Syntactic heads by the nearest-higher-rank rule.
std::vector<int> rank_heads(const std::vector<int>& classes) {
  const int n = static_cast<int>(classes.size());
  auto rank = [&](int j) { return kClasses[static_cast<std::size_t>(classes[static_cast<std::size_t>(j - 1)])].rank; };
  int root = 1;
  for (int j = 2; j <= n; ++j)
    if (rank(j) > rank(root)) root = j;
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  for (int j = 1; j <= n; ++j) {
    if (j == root) continue;
    int best = root;
    for (int dist = 1; dist < n; ++dist) {
      if (j - dist >= 1 && rank(j - dist) > rank(j)) {
        best = j - dist;
        break;
      }
      if (j + dist <= n && rank(j + dist) > rank(j)) {
        best = j + dist;
        break;
      }
    }
    heads[static_cast<std::size_t>(j - 1)] = best;
  }
  return heads;
}

}  // namespace

void validate_synth_config(const SynthConfig& cfg) {
  auto rate = [](double r, const char* what) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
  };
  rate(cfg.alignment_density, "alignment_density");
  rate(cfg.syntactic_agreement, "syntactic_agreement");
  rate(cfg.edge_noise, "edge_noise");
  if (cfg.sentence_count < 0) throw std::invalid_argument("sentence_count must be >= 0");
  if (cfg.min_length < 1) throw std::invalid_argument("min_length must be >= 1");
  if (cfg.max_length < cfg.min_length) throw std::invalid_argument("max_length must be >= min_length");
  if (cfg.words_per_class < 1) throw std::invalid_argument("words_per_class must be >= 1");
  // Forms are 1-3 CV syllables: 80 + 6400 + 512000 per class and flag.
  if (cfg.words_per_class > 50000) throw std::invalid_argument("words_per_class too large for the syllable inventory");
  if (cfg.labels.empty()) throw std::invalid_argument("label alphabet is empty");
  std::set<std::string> uniq;
  for (const auto& l : cfg.labels) {
    if (l.empty() || l == "_" || l == kTopLabel || l.find_first_of("\t\n\r ") != std::string::npos)
      throw std::invalid_argument("unusable label '" + l + "'");
    if (!uniq.insert(l).second) throw std::invalid_argument("duplicate label '" + l + "'");
  }
  if (cfg.labels.size() < 2 && cfg.edge_noise > 0)
    throw std::invalid_argument("edge noise needs at least two labels to relabel");
}

std::string synth_sentence_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "synth%06zu", i + 1);
  return buf;
}

SynthCorpus synth_corpus(const SynthConfig& cfg) {
  validate_synth_config(cfg);
  Rng lang_rng(derive_seed(cfg.seed, "language"));
  const Language lang = make_language(cfg, lang_rng);
  Rng rng(derive_seed(cfg.seed, "corpus"));
  const std::size_t L = cfg.labels.size();

  SynthCorpus out;
  for (int s = 0; s < cfg.sentence_count; ++s) {
    const int n = rng.range(cfg.min_length, cfg.max_length);

    // Target sentence and its syntax.
    std::vector<int> cls(static_cast<std::size_t>(n));
    std::vector<const Word*> words(static_cast<std::size_t>(n));
    Sentence target;
    for (int j = 1; j <= n; ++j) {
      const int c = draw_class(rng);
      const auto& lex = lang.lexicon[static_cast<std::size_t>(c)];
      const Word* w = &lex[rng.index(lex.size())];
      cls[static_cast<std::size_t>(j - 1)] = c;
      words[static_cast<std::size_t>(j - 1)] = w;
      Token t;
      t.index = j;
      t.form = w->form;
      t.lemma = w->form;
      t.pos = kClasses[static_cast<std::size_t>(c)].tag;
      target.push_back(std::move(t));
    }
    auto cls_of = [&](int j) { return cls[static_cast<std::size_t>(j - 1)]; };
    SyntacticTree tree;
    tree.tokens = target;
    tree.heads = rank_heads(cls);
    for (int j = 1; j <= n; ++j) {
      const int h = tree.head(j);
      tree.deprels.push_back(deprel_for(h ? cls_of(h) : 0, cls_of(j), j < h, h == 0));
    }

    // Gold semantic graph.
    SemanticGraph gold(target, {}, true);
    for (int j = 1; j <= n; ++j) {
      const int h = tree.head(j);
      if (h == 0) {
        gold.add_top(j);
        continue;
      }
      const int gp = tree.head(h);
      if (words[static_cast<std::size_t>(j - 1)]->raising && gp != 0)
        gold.add_edge(gp, j, lang.raise_label(cls_of(gp), cls_of(j)));
      else
        gold.add_edge(h, j, lang.edge_label(cls_of(h), cls_of(j), j < h));
    }

    // Which target tokens survive translation with an alignment link.
    const double d = cfg.alignment_density;
    const double spread = std::min({0.15, d, 1.0 - d});
    const double ds = d + spread * (2.0 * rng.uniform() - 1.0);
    const int k = std::clamp(static_cast<int>(std::lround(ds * n)), 0, n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) perm[static_cast<std::size_t>(j)] = j + 1;
    rng.shuffle(perm);
    std::vector<int> aligned(perm.begin(), perm.begin() + k);
    std::sort(aligned.begin(), aligned.end());

    // Source order: aligned targets with local swaps, then extra words inserted.
    std::vector<int> order = aligned;  // target index, or -1 for a source-only word
    for (std::size_t p = 0; p + 1 < order.size(); ++p)
      if (rng.bernoulli(0.15)) std::swap(order[p], order[p + 1]);
    int extras = 0;
    for (int u = 0; u < n - k; ++u)
      if (rng.bernoulli(0.5)) ++extras;
    for (int e = 0; e < extras; ++e) {
      const auto pos = static_cast<std::ptrdiff_t>(rng.index(order.size() + 1));
      order.insert(order.begin() + pos, -1);
    }
    const int m = static_cast<int>(order.size());
    std::vector<int> src_of(static_cast<std::size_t>(n) + 1, 0);  // target -> source
    Sentence source;
    for (int i = 1; i <= m; ++i) {
      const int t = order[static_cast<std::size_t>(i - 1)];
      Token tok;
      tok.index = i;
      if (t > 0) {
        src_of[static_cast<std::size_t>(t)] = i;
        std::string f = target[static_cast<std::size_t>(t - 1)].form;
        std::reverse(f.begin(), f.end());
        tok.form = "E" + f;
        tok.pos = target[static_cast<std::size_t>(t - 1)].pos;
      } else {
        const int c = draw_class(rng);
        tok.form = "Ex" + std::to_string(rng.index(1000));
        tok.pos = kClasses[static_cast<std::size_t>(c)].tag;
      }
      tok.lemma = tok.form;
      source.push_back(std::move(tok));
    }

    SemanticGraph src(source);
    for (const auto& e : gold.edges) {
      const int sh = e.head == 0 ? 0 : src_of[static_cast<std::size_t>(e.head)];
      const int sd = src_of[static_cast<std::size_t>(e.dep)];
      if ((e.head != 0 && sh == 0) || sd == 0) continue;
      src.add_edge(sh, sd, e.label);
    }
    // Noise over transferable edges among real tokens.
    if (cfg.edge_noise > 0) {
      std::vector<Edge> edges = src.edges;
      for (auto& e : edges) {
        if (e.head == 0 || !rng.bernoulli(cfg.edge_noise)) continue;
        bool reheaded = false;
        if (rng.bernoulli(0.5) && m > 2) {
          const int nh = rng.range(1, m);
          if (nh != e.dep && nh != e.head && !src.find(nh, e.dep)) {
            SemanticGraph trial = src;
            auto it = std::find(trial.edges.begin(), trial.edges.end(), e);
            trial.edges.erase(it);
            trial.add_edge(nh, e.dep, e.label);
            if (is_acyclic(trial)) {
              src = std::move(trial);
              reheaded = true;
            }
          }
        }
        if (!reheaded) {
          auto it = std::find(src.edges.begin(), src.edges.end(), e);
          std::string nl = e.label;
          while (nl == e.label) nl = cfg.labels[rng.index(L)];
          it->label = nl;
          e.label = nl;
        }
      }
    }
    // Source-only words hang off a random translated word.
    if (k > 0) {
      for (int i = 1; i <= m; ++i) {
        if (order[static_cast<std::size_t>(i - 1)] > 0) continue;
        int h;
        do {
          h = rng.range(1, m);
        } while (order[static_cast<std::size_t>(h - 1)] < 0);
        src.add_edge(h, i, cfg.labels[rng.index(L)]);
      }
    }

    // Alignment runs: shared true links plus direction-specific spurious ones.
    AlignmentSet truth;
    for (int t : aligned) truth.emplace(src_of[static_cast<std::size_t>(t)], t);
    AlignmentSet fwd = truth, bwd = truth;
    for (int i = 1; i <= m; ++i) {
      if (rng.bernoulli(0.1)) {
        std::pair<int, int> link{i, rng.range(1, n)};
        if (!truth.count(link)) fwd.insert(link);
      }
      if (rng.bernoulli(0.1)) {
        std::pair<int, int> link{i, rng.range(1, n)};
        if (!truth.count(link) && !fwd.count(link)) bwd.insert(link);
      }
    }

    out.source_graphs.push_back(std::move(src));
    out.target_sentences.push_back(std::move(target));
    out.gold_graphs.push_back(std::move(gold));
    out.forward.push_back(std::move(fwd));
    out.backward.push_back(std::move(bwd));
    out.trees.push_back(std::move(tree));
  }
  return out;
}

std::vector<std::string> write_synth_corpus(const SynthCorpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> paths;
  auto open = [&](const std::string& name) {
    paths.push_back((fs::path(dir) / name).string());
    std::ofstream f(paths.back(), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + paths.back());
    return f;
  };
  SdpDocument src, gold;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    src.push_back({synth_sentence_id(i), corpus.source_graphs[i], std::nullopt});
    gold.push_back({synth_sentence_id(i), corpus.gold_graphs[i], std::nullopt});
  }
  {
    auto f = open("source.sdp");
    write_sdp(f, src);
  }
  {
    auto f = open("target.gold.sdp");
    write_sdp(f, gold);
  }
  {
    auto f = open("forward.align");
    write_alignments(f, corpus.forward);
  }
  {
    auto f = open("backward.align");
    write_alignments(f, corpus.backward);
  }
  {
    auto f = open("target.conllu");
    std::vector<ConlluTree> trees;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      ConlluTree ct{corpus.trees[i], {}};
      ct.tree.comments = {"# sent_id = " + synth_sentence_id(i)};
      trees.push_back(std::move(ct));
    }
    write_conllu(f, trees);
  }
  return paths;
}

}  // namespace xsdp
