#ifndef XSDP_CHECKPOINT_H_
#define XSDP_CHECKPOINT_H_

// Binary model file:
//   "XSDPCKPT" | u32 version | u64 header bytes | JSON header
//   | u32 tensor count | per tensor: u32 name bytes, name, u32 rows, u32 cols,
//     rows*cols little-endian f64 (row-major)
// The header holds the network config, sharing topology, tasks, seed and all
// vocabularies. Tensors are matched by name, so their order is irrelevant.

#include <memory>
#include <optional>
#include <string>

#include "xsdp/network.h"

namespace xsdp {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckpointExpectation {
  std::optional<NetworkConfig> network;
  std::optional<SharingTopology> sharing;
};

void save_checkpoint(const ParserModel& model, const std::string& path);
std::string checkpoint_bytes(const ParserModel& model);

// Throws CheckpointError on a malformed file or when the stored config
// differs from a given expectation.
std::unique_ptr<ParserModel> load_checkpoint(const std::string& path, const CheckpointExpectation& expect = {});
std::unique_ptr<ParserModel> checkpoint_from_bytes(const std::string& bytes, const CheckpointExpectation& expect = {});

}  // namespace xsdp

#endif  // XSDP_CHECKPOINT_H_
