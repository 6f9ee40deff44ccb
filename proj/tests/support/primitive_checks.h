#ifndef XSDP_TESTS_SUPPORT_PRIMITIVE_CHECKS_H_
#define XSDP_TESTS_SUPPORT_PRIMITIVE_CHECKS_H_

// Finite-difference checks of every differentiable primitive. Each loss
// contracts the primitive's output with a fixed random matrix so that every
// output coordinate contributes a distinct weight.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "xsdp/autodiff.h"

namespace xsdp::testing {

struct PrimitiveCheck {
  std::string name;
  ad::GradCheckReport report;
};

inline ad::Matrix random_matrix(Rng& rng, int r, int c, double scale = 1.0) {
  ad::Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
  return m;
}

inline std::vector<PrimitiveCheck> run_primitive_checks(const ad::GradCheckOptions& opt) {
  using namespace ad;
  std::vector<PrimitiveCheck> out;
  Rng rng(2024);
  ParameterSet ps(7);
  Parameter& a = ps.add("a", 3, 4, Init::kGlorot);
  Parameter& b = ps.add("b", 3, 4, Init::kGlorot);
  Parameter& c = ps.add("c", 4, 5, Init::kGlorot);
  Parameter& row = ps.add("row", 1, 4, Init::kGlorot);
  Parameter& y = ps.add("y", 5, 2, Init::kGlorot);
  Parameter& table = ps.add("table", 6, 3, Init::kEmbedding);
  for (Parameter* p : ps.all()) p->value += random_matrix(rng, static_cast<int>(p->value.rows()), static_cast<int>(p->value.cols()), 0.5);

  auto contract = [&](const Matrix& proj) {
    return [proj](const Expr& e) {
      Tape& t = *e.tape();
      return sum(cmult(e, t.constant(proj)));
    };
  };
  auto check = [&](const std::string& name, std::vector<Parameter*> params, int r, int cl,
                   std::function<Expr(Tape&)> build) {
    auto weigh = contract(random_matrix(rng, r, cl));
    auto fn = [&](Tape& t) { return weigh(build(t)); };
    out.push_back({name, gradient_check(fn, params, opt)});
  };

  check("matmul", {&a, &c}, 3, 5, [&](Tape& t) { return matmul(t.param(a), t.param(c)); });
  check("add", {&a, &b}, 3, 4, [&](Tape& t) { return add(t.param(a), t.param(b)); });
  check("add_broadcast", {&a, &row}, 3, 4, [&](Tape& t) { return add(t.param(a), t.param(row)); });
  check("sub", {&a, &b}, 3, 4, [&](Tape& t) { return sub(t.param(a), t.param(b)); });
  check("cmult", {&a, &b}, 3, 4, [&](Tape& t) { return cmult(t.param(a), t.param(b)); });
  check("scale", {&a}, 3, 4, [&](Tape& t) { return scale(t.param(a), -1.7); });
  check("concat_cols", {&a, &b}, 3, 8, [&](Tape& t) { return concat_cols({t.param(a), t.param(b)}); });
  check("concat_rows", {&a, &row}, 4, 4, [&](Tape& t) { return concat_rows({t.param(row), t.param(a)}); });
  check("slice_cols", {&c}, 4, 2, [&](Tape& t) { return slice_cols(t.param(c), 2, 2); });
  check("slice_rows", {&c}, 2, 5, [&](Tape& t) { return slice_rows(t.param(c), 1, 2); });
  check("select_rows", {&c}, 4, 5, [&](Tape& t) { return select_rows(t.param(c), {3, 0, 3, 1}); });
  check("transpose", {&c}, 5, 4, [&](Tape& t) { return transpose(t.param(c)); });
  check("sigmoid", {&a}, 3, 4, [&](Tape& t) { return sigmoid(t.param(a)); });
  check("tanh", {&a}, 3, 4, [&](Tape& t) { return ad::tanh(t.param(a)); });
  check("softmax_rows", {&a}, 3, 4, [&](Tape& t) { return softmax_rows(t.param(a)); });
  check("lookup", {&table}, 4, 3, [&](Tape& t) { return lookup(t, table, {2, 0, 2, 5}); });
  check("bilinear", {&a, &c, &y}, 3, 2,
        [&](Tape& t) { return bilinear(t.param(a), t.param(c), transpose(t.param(y))); });
  check("dropout", {&a}, 3, 4, [&](Tape& t) {
    Rng local(99);
    return dropout(t.param(a), 0.4, local);
  });
  check("sum", {&a}, 1, 1, [&](Tape& t) { return sum(t.param(a)); });
  check("mean", {&a}, 1, 1, [&](Tape& t) { return mean(t.param(a)); });

  Matrix targets = (random_matrix(rng, 3, 4).array() > 0).cast<double>();
  Matrix weights = (random_matrix(rng, 3, 4).array() > -0.5).cast<double>();
  check("sigmoid_xent", {&a}, 1, 1, [&](Tape& t) { return sigmoid_xent(t.param(a), targets, weights); });
  Matrix allowed = Matrix::Ones(3, 4);
  allowed(0, 3) = 0;
  allowed(2, 0) = 0;
  check("softmax_xent", {&a}, 1, 1, [&](Tape& t) { return softmax_xent(t.param(a), {1, -1, 3}); });
  check("softmax_xent_allowed", {&a}, 1, 1,
        [&](Tape& t) { return softmax_xent(t.param(a), {1, 2, 3}, &allowed); });
  check("pick_cells", {&a, &b}, 3, 2, [&](Tape& t) {
    return pick_cells({t.param(a), t.param(b)}, {{0, 1}, {2, 3}, {0, 1}});
  });
  return out;
}

}  // namespace xsdp::testing

#endif  // XSDP_TESTS_SUPPORT_PRIMITIVE_CHECKS_H_
