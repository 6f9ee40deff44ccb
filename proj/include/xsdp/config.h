#ifndef XSDP_CONFIG_H_
#define XSDP_CONFIG_H_

#include <cstdint>
#include <string>

#include <json.hpp>

#include "xsdp/network.h"
#include "xsdp/synth.h"
#include "xsdp/training.h"

namespace xsdp {

using Json = nlohmann::ordered_json;

// Everything a pipeline run depends on. JSON keys mirror the field names;
// nested objects: network (with dropout), sharing, train, synth, projection.
struct PipelineConfig {
  std::uint64_t seed = 1;
  NetworkConfig network;
  SharingTopology sharing;
  TrainConfig train;
  SynthConfig synth;
  double heldout_fraction = 0.05;
  double density_threshold = 0.8;
  int threads = 1;
};

Json to_json(const NetworkConfig& c);
Json to_json(const SharingTopology& t);
Json to_json(const TrainConfig& c);
Json to_json(const SynthConfig& c);
Json to_json(const PipelineConfig& c);

// Overlay j onto base. Unknown keys and wrongly typed values raise
// std::invalid_argument naming the dotted key path.
NetworkConfig network_from_json(const Json& j, NetworkConfig base = {});
SharingTopology sharing_from_json(const Json& j, SharingTopology base = {});
TrainConfig train_from_json(const Json& j, TrainConfig base = {});
SynthConfig synth_from_json(const Json& j, SynthConfig base = {});
PipelineConfig config_from_json(const Json& j, PipelineConfig base = {});

PipelineConfig load_config(const std::string& path, PipelineConfig base = {});

}  // namespace xsdp

#endif  // XSDP_CONFIG_H_
