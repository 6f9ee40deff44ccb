#include "xsdp/evaluation.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace xsdp {

namespace {

double ratio(std::int64_t a, std::int64_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }
// 2PR / (P + R) written over counts, so only one rounding step.
double f1(const Counts& c) { return ratio(2 * c.correct, c.gold + c.predicted); }

void check_corpora(const std::vector<SemanticGraph>& a, const std::vector<SemanticGraph>& b, const char* what) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(a.size()) + " predicted vs " +
                                std::to_string(b.size()) + " gold sentences");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].size() != b[i].size())
      throw std::invalid_argument(std::string(what) + ": sentence " + std::to_string(i + 1) + " has " +
                                  std::to_string(a[i].size()) + " predicted vs " + std::to_string(b[i].size()) +
                                  " gold tokens");
}

std::string fmt(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  return std::string(buf, r.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

// Gold incoming edges of every token, keyed by dependent.
std::vector<std::vector<const Edge*>> incoming(const SemanticGraph& g) {
  std::vector<std::vector<const Edge*>> in(static_cast<std::size_t>(g.size()) + 1);
  for (const auto& e : g.edges)
    if (e.dep >= 1 && e.dep <= g.size()) in[static_cast<std::size_t>(e.dep)].push_back(&e);
  return in;
}

}  // namespace

ScoreReport make_report(const Counts& labeled, const Counts& unlabeled) {
  ScoreReport r;
  r.labeled = labeled;
  r.unlabeled = unlabeled;
  r.lp = ratio(labeled.correct, labeled.predicted);
  r.lr = ratio(labeled.correct, labeled.gold);
  r.lf = f1(labeled);
  r.up = ratio(unlabeled.correct, unlabeled.predicted);
  r.ur = ratio(unlabeled.correct, unlabeled.gold);
  r.uf = f1(unlabeled);
  return r;
}

ScoreReport score_graphs(const std::vector<SemanticGraph>& predicted, const std::vector<SemanticGraph>& gold) {
  check_corpora(predicted, gold, "score_graphs");
  Counts l, u;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::set<std::pair<int, int>> gu;
    for (const auto& e : gold[i].edges) gu.emplace(e.head, e.dep);
    std::set<std::pair<int, int>> pu;
    for (const auto& e : predicted[i].edges) pu.emplace(e.head, e.dep);
    l.gold += static_cast<std::int64_t>(gold[i].edges.size());
    l.predicted += static_cast<std::int64_t>(predicted[i].edges.size());
    u.gold += static_cast<std::int64_t>(gu.size());
    u.predicted += static_cast<std::int64_t>(pu.size());
    for (const auto& e : predicted[i].edges) {
      const std::string* g = gold[i].find(e.head, e.dep);
      if (g && *g == e.label) ++l.correct;
    }
    for (const auto& c : pu)
      if (gu.count(c)) ++u.correct;
  }
  return make_report(l, u);
}

std::string format_report_kv(const ScoreReport& r) {
  std::ostringstream o;
  o << "LP=" << fmt(r.lp) << " LR=" << fmt(r.lr) << " LF=" << fmt(r.lf) << " UP=" << fmt(r.up)
    << " UR=" << fmt(r.ur) << " UF=" << fmt(r.uf) << " gold=" << r.labeled.gold
    << " predicted=" << r.labeled.predicted << " labeled_correct=" << r.labeled.correct
    << " unlabeled_correct=" << r.unlabeled.correct << '\n';
  return o.str();
}

std::string format_report_table(const ScoreReport& r) {
  std::ostringstream o;
  auto row = [&](const char* name, double p, double rc, double f, const Counts& c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %9.4f %9.4f %9.4f %8lld %8lld %8lld\n", name, 100 * p, 100 * rc, 100 * f,
                  static_cast<long long>(c.gold), static_cast<long long>(c.predicted),
                  static_cast<long long>(c.correct));
    o << buf;
  };
  char head[160];
  std::snprintf(head, sizeof head, "%-10s %9s %9s %9s %8s %8s %8s\n", "", "P", "R", "F1", "gold", "pred", "correct");
  o << head;
  row("labeled", r.lp, r.lr, r.lf, r.labeled);
  row("unlabeled", r.up, r.ur, r.uf, r.unlabeled);
  return o.str();
}

std::array<BucketStat, kNumLengthBuckets> length_buckets(const std::vector<SemanticGraph>& predicted,
                                                         const std::vector<SemanticGraph>& gold) {
  check_corpora(predicted, gold, "length_buckets");
  std::array<BucketStat, kNumLengthBuckets> out{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (const auto& e : predicted[i].edges) {
      if (e.head == 0 || e.head == e.dep) continue;
      auto& b = out[static_cast<std::size_t>(length_bucket(dependency_length(e.head, e.dep)))];
      ++b.predicted;
      const std::string* g = gold[i].find(e.head, e.dep);
      if (g && *g == e.label) ++b.correct;
    }
  }
  return out;
}

std::optional<double> HeadMatchRow::match_rate() const {
  if (tokens == 0) return std::nullopt;
  return static_cast<double>(matches) / static_cast<double>(tokens);
}

std::optional<double> HeadMatchRow::mismatch_rate() const {
  if (tokens == 0) return std::nullopt;
  return static_cast<double>(mismatches) / static_cast<double>(tokens);
}

HeadMatchStats head_match_stats(const std::vector<SemanticGraph>& gold, const std::vector<SyntacticTree>& trees,
                                const std::vector<SemanticGraph>& a, const std::vector<SemanticGraph>& b) {
  check_corpora(a, gold, "head_match_stats");
  check_corpora(b, gold, "head_match_stats");
  if (trees.size() != gold.size()) throw std::invalid_argument("head_match_stats: tree count differs");
  HeadMatchStats s;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const SyntacticTree& t = trees[i];
    if (t.size() != gold[i].size()) throw std::invalid_argument("head_match_stats: tree length differs");
    const auto gin = incoming(gold[i]);
    for (int j = 1; j <= gold[i].size(); ++j) {
      int la = 0, lb = 0, ua = 0, ub = 0;
      bool match = false, mismatch = false;
      for (const Edge* e : gin[static_cast<std::size_t>(j)]) {
        const std::string* pa = a[i].find(e->head, j);
        const std::string* pb = b[i].find(e->head, j);
        ua += pa != nullptr;
        ub += pb != nullptr;
        la += pa && *pa == e->label;
        lb += pb && *pb == e->label;
        if (e->head == t.head(j)) match = true;
        if (e->head >= 1 && t.head(e->head) == j) mismatch = true;
      }
      auto add = [&](HeadMatchRow& r) {
        ++r.tokens;
        r.matches += match;
        r.mismatches += mismatch;
      };
      if (la > lb) add(s.a_labeled);
      if (lb > la) add(s.b_labeled);
      if (ua > ub) add(s.a_unlabeled);
      if (ub > ua) add(s.b_unlabeled);
    }
  }
  return s;
}

std::map<std::string, double> label_contribution(const std::vector<SemanticGraph>& multi,
                                                 const std::vector<SemanticGraph>& single,
                                                 const std::vector<SemanticGraph>& gold,
                                                 const std::vector<SyntacticTree>& trees) {
  check_corpora(multi, gold, "label_contribution");
  check_corpora(single, gold, "label_contribution");
  if (trees.size() != gold.size()) throw std::invalid_argument("label_contribution: tree count differs");
  std::map<std::string, std::int64_t> counts;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (trees[i].size() != gold[i].size()) throw std::invalid_argument("label_contribution: tree length differs");
    for (const auto& e : gold[i].edges) {
      const std::string* m = multi[i].find(e.head, e.dep);
      const std::string* s = single[i].find(e.head, e.dep);
      if (m && *m == e.label && !(s && *s == e.label)) {
        ++counts[trees[i].deprel(e.dep)];
        ++total;
      }
    }
  }
  std::map<std::string, double> out;
  for (const auto& [rel, c] : counts) out[rel] = 100.0 * static_cast<double>(c) / static_cast<double>(total);
  return out;
}

std::string format_buckets(const std::array<BucketStat, kNumLengthBuckets>& b) {
  std::string out = "bucket\tpredicted\tcorrect\tprecision\n";
  for (int k = 0; k < kNumLengthBuckets; ++k) {
    const auto& s = b[static_cast<std::size_t>(k)];
    out += std::string(kLengthBucketNames[static_cast<std::size_t>(k)]) + "\t" + std::to_string(s.predicted) + "\t" +
           std::to_string(s.correct) + "\t" + fmt(s.precision()) + "\n";
  }
  return out;
}

std::string format_head_match(const HeadMatchStats& s) {
  std::string out = "set\ttokens\tmatch\tmismatch\n";
  auto row = [&](const char* name, const HeadMatchRow& r) {
    out += std::string(name) + "\t" + std::to_string(r.tokens) + "\t" + fmt(r.match_rate()) + "\t" +
           fmt(r.mismatch_rate()) + "\n";
  };
  row("A_labeled", s.a_labeled);
  row("B_labeled", s.b_labeled);
  row("A_unlabeled", s.a_unlabeled);
  row("B_unlabeled", s.b_unlabeled);
  return out;
}

std::string format_contribution(const std::map<std::string, double>& c) {
  std::string out = "deprel\tpercent\n";
  for (const auto& [rel, pct] : c) out += rel + "\t" + fmt(pct) + "\n";
  return out;
}

}  // namespace xsdp
