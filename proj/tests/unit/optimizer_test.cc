#include <doctest.h>

#include <cmath>

#include "xsdp/optimizer.h"

using namespace xsdp::ad;

TEST_CASE("constant gradient moves each coordinate by lr in the sign direction") {
  ParameterSet ps;
  Parameter& p = ps.add("p", 1, 3, Init::kZero);
  AdamConfig cfg;
  cfg.lr = 0.01;
  const double g[3] = {2.0, -0.5, 1e-3};
  for (int step = 1; step <= 50; ++step) {
    Matrix before = p.value;
    for (int k = 0; k < 3; ++k) p.grad(0, k) = g[k];
    adam_step({&p}, cfg);
    for (int k = 0; k < 3; ++k) {
      const double expect = cfg.lr * g[k] / (std::abs(g[k]) + cfg.eps);
      CHECK(before(0, k) - p.value(0, k) == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(p.grad.isZero());
    CHECK(p.steps == step);
  }
}

TEST_CASE("bias-corrected moments match a hand computation") {
  ParameterSet ps;
  Parameter& p = ps.add("p", 1, 1, Init::kZero);
  AdamConfig cfg;
  const double g1 = 1.0, g2 = -3.0;
  p.grad(0, 0) = g1;
  adam_step({&p}, cfg);
  p.grad(0, 0) = g2;
  adam_step({&p}, cfg);
  const double m = (0.9 * 0.1 * g1 + 0.1 * g2) / (1 - 0.81);
  const double v = (0.999 * 0.001 * g1 * g1 + 0.001 * g2 * g2) / (1 - 0.999 * 0.999);
  const double second = cfg.lr * m / (std::sqrt(v) + cfg.eps);
  const double first = cfg.lr * g1 / (std::abs(g1) + cfg.eps);
  CHECK(p.value(0, 0) == doctest::Approx(-(first + second)).epsilon(1e-12));
}

TEST_CASE("zero learning rate and frozen parameters leave values unchanged") {
  ParameterSet ps(3);
  Parameter& p = ps.add("p", 2, 2, Init::kGlorot);
  Parameter& frozen = ps.add("f", 2, 2, Init::kGlorot, false);
  Matrix p0 = p.value, f0 = frozen.value;
  p.grad.setOnes();
  frozen.grad.setOnes();
  AdamConfig cfg;
  cfg.lr = 0;
  adam_step({&p, &frozen}, cfg);
  CHECK(p.value == p0);
  cfg.lr = 0.1;
  p.grad.setOnes();
  adam_step(ps.trainable(), cfg);
  CHECK(p.value != p0);
  CHECK(frozen.value == f0);
  CHECK(ps.trainable().size() == 1);
}
