#include "xsdp/projection.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "xsdp/rng.h"

namespace xsdp {

IntersectedAlignment::IntersectedAlignment(const AlignmentSet& links, int source_length)
    : map_(static_cast<std::size_t>(source_length) + 1, -1) {
  if (source_length < 0) throw std::invalid_argument("negative source length");
  map_[0] = 0;
  std::vector<int> used;
  for (const auto& [s, t] : links) {
    if (s < 1 || s > source_length)
      throw std::invalid_argument("alignment source index " + std::to_string(s) +
                                  " outside source of length " + std::to_string(source_length));
    if (t < 1) throw std::invalid_argument("alignment target index must be >= 1");
    if (map_[static_cast<std::size_t>(s)] != -1)
      throw std::invalid_argument("source token " + std::to_string(s) + " aligned twice");
    map_[static_cast<std::size_t>(s)] = t;
    used.push_back(t);
  }
  std::sort(used.begin(), used.end());
  if (std::adjacent_find(used.begin(), used.end()) != used.end())
    throw std::invalid_argument("target token aligned twice");
}

std::optional<int> IntersectedAlignment::target(int source) const {
  if (source < 0 || source > source_length())
    throw std::out_of_range("source index " + std::to_string(source));
  int t = map_[static_cast<std::size_t>(source)];
  if (t < 0) return std::nullopt;
  return t;
}

AlignmentSet IntersectedAlignment::links() const {
  AlignmentSet out;
  for (int s = 1; s <= source_length(); ++s)
    if (map_[static_cast<std::size_t>(s)] >= 0) out.emplace(s, map_[static_cast<std::size_t>(s)]);
  return out;
}

AlignmentSet intersect_links(const AlignmentSet& forward, const AlignmentSet& backward) {
  std::vector<std::pair<int, int>> both;
  std::set_intersection(forward.begin(), forward.end(), backward.begin(), backward.end(),
                        std::back_inserter(both));
  std::map<int, int> src_count, tgt_count;
  for (const auto& [s, t] : both) {
    ++src_count[s];
    ++tgt_count[t];
  }
  AlignmentSet out;
  for (const auto& [s, t] : both)
    if (src_count[s] == 1 && tgt_count[t] == 1) out.emplace(s, t);
  return out;
}

IntersectedAlignment intersect_alignments(const AlignmentSet& forward, const AlignmentSet& backward,
                                          int source_length) {
  return IntersectedAlignment(intersect_links(forward, backward), source_length);
}

PartialGraph project_graph(const SemanticGraph& source, const IntersectedAlignment& a,
                           const Sentence& target) {
  const int n = static_cast<int>(target.size());
  if (a.source_length() != source.size())
    throw std::invalid_argument("alignment covers " + std::to_string(a.source_length()) +
                                " source tokens, source sentence has " + std::to_string(source.size()));
  std::vector<int> aligned;
  for (int s = 1; s <= source.size(); ++s) {
    if (auto t = a.target(s)) {
      if (*t > n)
        throw std::invalid_argument("alignment target " + std::to_string(*t) +
                                    " exceeds target length " + std::to_string(n));
      aligned.push_back(*t);
    }
  }
  SemanticGraph g(target);
  for (const auto& e : source.edges) {
    auto h = a.target(e.head);
    auto d = a.target(e.dep);
    if (!h || !d) continue;
    if (const std::string* existing = g.find(*h, *d)) {
      if (*existing != e.label)
        throw std::invalid_argument("conflicting labels '" + *existing + "' and '" + e.label +
                                    "' projected onto cell (" + std::to_string(*h) + "," +
                                    std::to_string(*d) + ")");
      continue;
    }
    g.add_edge(*h, *d, e.label);
  }
  return PartialGraph(std::move(g), std::move(aligned));
}

double alignment_density(const IntersectedAlignment& a, int target_length) {
  if (target_length < 1) throw std::invalid_argument("alignment_density: empty target sentence");
  std::vector<char> hit(static_cast<std::size_t>(target_length) + 1, 0);
  int count = 0;
  for (int s = 1; s <= a.source_length(); ++s) {
    auto t = a.target(s);
    if (t && *t <= target_length && !hit[static_cast<std::size_t>(*t)]) {
      hit[static_cast<std::size_t>(*t)] = 1;
      ++count;
    }
  }
  return static_cast<double>(count) / target_length;
}

std::vector<std::size_t> density_sample(std::span<const double> densities, std::size_t k,
                                        double threshold, std::uint64_t seed) {
  if (k % 2 != 0) throw std::invalid_argument("density_sample: sample size must be even");
  std::vector<std::size_t> below, above;
  for (std::size_t i = 0; i < densities.size(); ++i)
    (densities[i] < threshold ? below : above).push_back(i);
  const std::size_t half = k / 2;
  if (below.size() < half || above.size() < half)
    throw std::invalid_argument("density_sample: need " + std::to_string(half) +
                                " sentences on each side of " + std::to_string(threshold) + ", have " +
                                std::to_string(below.size()) + " below and " +
                                std::to_string(above.size()) + " at or above");
  Rng rng(seed);
  rng.shuffle(below);
  rng.shuffle(above);
  std::vector<std::size_t> out(below.begin(), below.begin() + static_cast<std::ptrdiff_t>(half));
  out.insert(out.end(), above.begin(), above.begin() + static_cast<std::ptrdiff_t>(half));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PartialGraph> density_sample(const std::vector<PartialGraph>& corpus, std::size_t k,
                                         double threshold, std::uint64_t seed) {
  std::vector<double> d;
  d.reserve(corpus.size());
  for (const auto& p : corpus) d.push_back(p.density());
  std::vector<PartialGraph> out;
  for (std::size_t i : density_sample(d, k, threshold, seed)) out.push_back(corpus[i]);
  return out;
}

Split heldout_split(std::size_t corpus_size, double fraction, std::uint64_t seed) {
  if (corpus_size == 0) throw std::invalid_argument("heldout_split: empty corpus");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("heldout_split: fraction must be in (0, 1)");
  const auto n_held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(corpus_size)));
  std::vector<std::size_t> order(corpus_size);
  for (std::size_t i = 0; i < corpus_size; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  Split s;
  s.heldout.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_held));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_held), order.end());
  std::sort(s.heldout.begin(), s.heldout.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

}  // namespace xsdp
