#ifndef XSDP_OPTIMIZER_H_
#define XSDP_OPTIMIZER_H_

#include <vector>

#include "xsdp/autodiff.h"

namespace xsdp::ad {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update per trainable parameter, then clears
// gradients. Non-trainable parameters are left untouched.
void adam_step(const std::vector<Parameter*>& params, const AdamConfig& cfg);

}  // namespace xsdp::ad

#endif  // XSDP_OPTIMIZER_H_
