#ifndef XSDP_PROJECTION_H_
#define XSDP_PROJECTION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "xsdp/formats.h"
#include "xsdp/graph.h"

namespace xsdp {

// One-to-one map from source tokens 0..m to target tokens; a(0) = 0.
class IntersectedAlignment {
 public:
  IntersectedAlignment() : map_(1, 0) {}
  // links must already be one-to-one; source indices in 1..m.
  IntersectedAlignment(const AlignmentSet& links, int source_length);

  int source_length() const { return static_cast<int>(map_.size()) - 1; }
  std::optional<int> target(int source) const;
  // Links as (source, target) pairs, source ascending.
  AlignmentSet links() const;

 private:
  std::vector<int> map_;  // -1 = null
};

// forward ∩ backward, then every link whose source or target takes part in
// more than one surviving link is dropped.
AlignmentSet intersect_links(const AlignmentSet& forward, const AlignmentSet& backward);

IntersectedAlignment intersect_alignments(const AlignmentSet& forward,
                                          const AlignmentSet& backward, int source_length);

// Transfers every source edge whose endpoints are both aligned, labels verbatim.
// Throws std::invalid_argument if the alignment covers a different source
// length, targets an index beyond the target sentence, or two source edges
// land on one target cell with different labels.
PartialGraph project_graph(const SemanticGraph& source, const IntersectedAlignment& a,
                           const Sentence& target);

// Aligned target tokens / target length.
double alignment_density(const IntersectedAlignment& a, int target_length);

// Returns k indices (ascending): k/2 with density < threshold and k/2 with
// density >= threshold, each half drawn uniformly under seed.
std::vector<std::size_t> density_sample(std::span<const double> densities, std::size_t k,
                                        double threshold, std::uint64_t seed);
std::vector<PartialGraph> density_sample(const std::vector<PartialGraph>& corpus, std::size_t k,
                                         double threshold, std::uint64_t seed);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> heldout;
};

// Disjoint partition with |heldout| = round(fraction * corpus_size); both
// index lists ascending.
Split heldout_split(std::size_t corpus_size, double fraction, std::uint64_t seed);

}  // namespace xsdp

#endif  // XSDP_PROJECTION_H_
