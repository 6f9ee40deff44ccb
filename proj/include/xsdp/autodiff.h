#ifndef XSDP_AUTODIFF_H_
#define XSDP_AUTODIFF_H_

// Reverse-mode automatic differentiation over dense row-major matrices.
//
// A Tape records primitive applications in creation order, which is a
// topological order; Tape::backward walks it once in reverse. Parameters
// live outside any tape and receive accumulated gradients when a tape that
// read them runs backward. Vectors are 1 x d matrices.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "xsdp/rng.h"

namespace xsdp::ad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;  // same shape as value
  Matrix m;     // Adam first moment
  Matrix v;     // Adam second moment
  std::int64_t steps = 0;
  bool trainable = true;

  Parameter(std::string n, Matrix init, bool is_trainable = true);
  void zero_grad() { grad.setZero(); }
};

enum class Init { kZero, kGlorot, kEmbedding, kOne };

// Name-keyed parameter collection. Every parameter is initialized from a
// generator seeded by (seed, name), so values do not depend on creation order.
class ParameterSet {
 public:
  explicit ParameterSet(std::uint64_t seed = 1) : seed_(seed) {}
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;

  Parameter& add(const std::string& name, int rows, int cols, Init init, bool trainable = true);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) > 0; }
  std::size_t size() const { return params_.size(); }
  std::uint64_t seed() const { return seed_; }

  // Name-ordered.
  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  std::vector<Parameter*> trainable();
  void zero_grad();

  // Value snapshot / restore (names must match).
  std::map<std::string, Matrix> snapshot() const;
  void restore(const std::map<std::string, Matrix>& values);

 private:
  std::uint64_t seed_;
  std::map<std::string, std::unique_ptr<Parameter>> params_;
};

class Tape;

// Handle to a node on a tape.
class Expr {
 public:
  Expr() = default;
  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;
  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr && id_ >= 0; }

 private:
  friend class Tape;
  Expr(Tape* t, int id) : tape_(t), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  // Receives the node's output value and gradient; pushes into argument gradients.
  using BackwardFn = std::function<void(Tape&, const Matrix& value, const Matrix& grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Expr constant(Matrix value);
  // One leaf per parameter per tape.
  Expr param(Parameter& p);

  // Records a primitive's output. fn is dropped when no argument needs a gradient.
  Expr record(Matrix value, std::initializer_list<Expr> args, BackwardFn fn);
  Expr record(Matrix value, const std::vector<Expr>& args, BackwardFn fn);
  // A node that needs a gradient without tape arguments (e.g. embedding gathers).
  Expr record_leaf(Matrix value, bool requires_grad, BackwardFn fn);

  const Matrix& value(const Expr& e) const { return nodes_[static_cast<std::size_t>(check(e))].value; }
  bool requires_grad(const Expr& e) const { return nodes_[static_cast<std::size_t>(check(e))].requires_grad; }
  // Gradient accumulator of e, zero-allocated on first use.
  Matrix& grad_of(const Expr& e);

  // Seeds d(loss)/d(loss) = 1 and propagates to every parameter read by this tape.
  void backward(const Expr& loss);
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter* param = nullptr;
  };
  int check(const Expr& e) const;
  std::vector<Node> nodes_;
  std::unordered_map<Parameter*, int> param_nodes_;
  bool backward_done_ = false;
};

// ---- primitives -----------------------------------------------------------------

Expr matmul(const Expr& a, const Expr& b);
// b may match a's shape or be a 1 x cols row broadcast over a's rows.
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr cmult(const Expr& a, const Expr& b);
Expr scale(const Expr& a, double c);
Expr concat_cols(const std::vector<Expr>& parts);
Expr concat_rows(const std::vector<Expr>& parts);
Expr slice_cols(const Expr& a, int start, int count);
Expr slice_rows(const Expr& a, int start, int count);
Expr select_rows(const Expr& a, const std::vector<int>& rows);
Expr transpose(const Expr& a);
Expr sigmoid(const Expr& a);
Expr tanh(const Expr& a);
// Row-wise, max-subtracted.
Expr softmax_rows(const Expr& a);
// Rows of table at ids; gradients scatter into the table.
Expr lookup(Tape& t, Parameter& table, const std::vector<int>& ids);
// X W Y^T for X (r x d), W (d x e), Y (c x e); for row vectors this is x^T W y.
Expr bilinear(const Expr& x, const Expr& w, const Expr& y);
// Inverted dropout with an explicit keep-mask of 0 / 1/(1-p) entries.
Expr dropout(const Expr& a, double p, Rng& rng);
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng);
Expr sum(const Expr& a);
Expr mean(const Expr& a);
// sum over cells of weight * (softplus(s) - target * s); zero-weight cells are skipped.
Expr sigmoid_xent(const Expr& logits, const Matrix& targets, const Matrix& weights);
// sum over rows with target >= 0 of -log softmax(row)[target]; allowed (optional,
// same shape, 0/1) removes candidates from the normalizer.
Expr softmax_xent(const Expr& logits, const std::vector<int>& targets, const Matrix* allowed = nullptr);
// out(e, k) = mats[k](cells[e].first, cells[e].second).
Expr pick_cells(const std::vector<Expr>& mats, const std::vector<std::pair<int, int>>& cells);

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return matmul(a, b); }
inline Expr operator*(double c, const Expr& a) { return scale(a, c); }

// ---- gradient checking ------------------------------------------------------------

class NonDeterministicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  std::size_t coords_checked = 0;
  double tolerance = 0.0;
  bool passed = false;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  // Denominator floor of the relative error |a - n| / max(|a|, |n|, floor).
  double floor = 1e-3;
  // Per parameter; <= 0 checks every coordinate.
  int max_coords = 0;
  std::uint64_t seed = 1;  // picks coordinates when max_coords > 0
};

// Central differences against Tape::backward. loss_fn must build a scalar
// loss on the tape it is given and be deterministic; two evaluations that
// differ raise NonDeterministicError.
GradCheckReport gradient_check(const std::function<Expr(Tape&)>& loss_fn,
                               const std::vector<Parameter*>& params,
                               const GradCheckOptions& opt = {});

}  // namespace xsdp::ad

#endif  // XSDP_AUTODIFF_H_
