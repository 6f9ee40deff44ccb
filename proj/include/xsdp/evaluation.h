#ifndef XSDP_EVALUATION_H_
#define XSDP_EVALUATION_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xsdp/graph.h"

namespace xsdp {

struct Counts {
  std::int64_t gold = 0;
  std::int64_t predicted = 0;
  std::int64_t correct = 0;
  bool operator==(const Counts&) const = default;
};

// Micro-averaged scores; top edges (0, t, "TOP") are ordinary edges.
struct ScoreReport {
  Counts labeled, unlabeled;
  double lp = 0, lr = 0, lf = 0;
  double up = 0, ur = 0, uf = 0;
};

ScoreReport make_report(const Counts& labeled, const Counts& unlabeled);

// Throws std::invalid_argument on sentence-count or sentence-length mismatch.
ScoreReport score_graphs(const std::vector<SemanticGraph>& predicted, const std::vector<SemanticGraph>& gold);

std::string format_report_kv(const ScoreReport& r);
std::string format_report_table(const ScoreReport& r);

struct BucketStat {
  std::int64_t predicted = 0;
  std::int64_t correct = 0;
  std::optional<double> precision() const {
    if (predicted == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(predicted);
  }
};

// Labeled precision of predicted non-top edges grouped by |head - dep|.
std::array<BucketStat, kNumLengthBuckets> length_buckets(const std::vector<SemanticGraph>& predicted,
                                                         const std::vector<SemanticGraph>& gold);

struct HeadMatchRow {
  std::int64_t tokens = 0;
  std::int64_t matches = 0;     // syntactic head is one of the gold semantic heads
  std::int64_t mismatches = 0;  // some gold semantic edge h -> j reverses syntactic edge j -> h
  std::optional<double> match_rate() const;
  std::optional<double> mismatch_rate() const;
};

// Tokens whose incoming gold edges are recovered more often by A than by B
// (and vice versa), for labeled and unlabeled correctness.
struct HeadMatchStats {
  HeadMatchRow a_labeled, b_labeled, a_unlabeled, b_unlabeled;
};

HeadMatchStats head_match_stats(const std::vector<SemanticGraph>& gold, const std::vector<SyntacticTree>& trees,
                                const std::vector<SemanticGraph>& a, const std::vector<SemanticGraph>& b);

// Gold edges labeled-correct under `multi` but not under `single`, attributed
// to the dependent's syntactic deprel; percentages sum to 100 (empty when no
// edge improved).
std::map<std::string, double> label_contribution(const std::vector<SemanticGraph>& multi,
                                                 const std::vector<SemanticGraph>& single,
                                                 const std::vector<SemanticGraph>& gold,
                                                 const std::vector<SyntacticTree>& trees);

// Plain data series (tab separated, header line) for external plotting.
std::string format_buckets(const std::array<BucketStat, kNumLengthBuckets>& b);
std::string format_head_match(const HeadMatchStats& s);
std::string format_contribution(const std::map<std::string, double>& c);

}  // namespace xsdp

#endif  // XSDP_EVALUATION_H_
