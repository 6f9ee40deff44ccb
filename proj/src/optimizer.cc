#include "xsdp/optimizer.h"

#include <cmath>

namespace xsdp::ad {

void adam_step(const std::vector<Parameter*>& params, const AdamConfig& cfg) {
  for (Parameter* p : params) {
    if (!p->trainable) {
      p->zero_grad();
      continue;
    }
    ++p->steps;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->steps));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->steps));
    p->m = cfg.beta1 * p->m + (1.0 - cfg.beta1) * p->grad;
    p->v = cfg.beta2 * p->v + (1.0 - cfg.beta2) * p->grad.cwiseProduct(p->grad);
    p->value.array() -= cfg.lr * (p->m.array() / c1) / ((p->v.array() / c2).sqrt() + cfg.eps);
    p->zero_grad();
  }
}

}  // namespace xsdp::ad
