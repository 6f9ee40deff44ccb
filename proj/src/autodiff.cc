#include "xsdp/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace xsdp::ad {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

[[noreturn]] void shape_error(const char* op, const std::string& detail) {
  throw ShapeError(std::string(op) + ": shape mismatch " + detail);
}

Tape& tape_of(const Expr& e, const char* op) {
  if (!e.valid()) throw std::invalid_argument(std::string(op) + ": invalid expression");
  return *e.tape();
}

Tape& same_tape(const Expr& a, const Expr& b, const char* op) {
  Tape& t = tape_of(a, op);
  if (&tape_of(b, op) != &t) throw std::invalid_argument(std::string(op) + ": arguments on different tapes");
  return t;
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

// ---- Parameter / ParameterSet -----------------------------------------------------

Parameter::Parameter(std::string n, Matrix init, bool is_trainable)
    : name(std::move(n)), value(std::move(init)), trainable(is_trainable) {
  grad = Matrix::Zero(value.rows(), value.cols());
  m = Matrix::Zero(value.rows(), value.cols());
  v = Matrix::Zero(value.rows(), value.cols());
}

Parameter& ParameterSet::add(const std::string& name, int rows, int cols, Init init, bool trainable) {
  if (rows < 1 || cols < 1) throw ShapeError("parameter '" + name + "' needs positive dimensions");
  if (params_.count(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  Rng rng(derive_seed(seed_, name));
  Matrix value(rows, cols);
  double bound = 0.0;
  switch (init) {
    case Init::kZero: value.setZero(); break;
    case Init::kOne: value.setOnes(); break;
    case Init::kGlorot: bound = std::sqrt(6.0 / (rows + cols)); break;
    case Init::kEmbedding: bound = std::sqrt(3.0 / cols); break;
  }
  if (bound > 0) {
    for (Eigen::Index i = 0; i < value.size(); ++i) value.data()[i] = rng.uniform(-bound, bound);
  }
  auto p = std::make_unique<Parameter>(name, std::move(value), trainable);
  Parameter& ref = *p;
  params_.emplace(name, std::move(p));
  return ref;
}

Parameter& ParameterSet::get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("no parameter '" + name + "'");
  return *it->second;
}

const Parameter& ParameterSet::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("no parameter '" + name + "'");
  return *it->second;
}

std::vector<Parameter*> ParameterSet::all() {
  std::vector<Parameter*> out;
  for (auto& [_, p] : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterSet::all() const {
  std::vector<const Parameter*> out;
  for (const auto& [_, p] : params_) out.push_back(p.get());
  return out;
}

std::vector<Parameter*> ParameterSet::trainable() {
  std::vector<Parameter*> out;
  for (auto& [_, p] : params_)
    if (p->trainable) out.push_back(p.get());
  return out;
}

void ParameterSet::zero_grad() {
  for (auto& [_, p] : params_) p->zero_grad();
}

std::map<std::string, Matrix> ParameterSet::snapshot() const {
  std::map<std::string, Matrix> out;
  for (const auto& [name, p] : params_) out.emplace(name, p->value);
  return out;
}

void ParameterSet::restore(const std::map<std::string, Matrix>& values) {
  for (const auto& [name, v] : values) {
    Parameter& p = get(name);
    if (p.value.rows() != v.rows() || p.value.cols() != v.cols())
      throw ShapeError("restore '" + name + "': " + shape(p.value) + " vs " + shape(v));
    p.value = v;
  }
}

// ---- Expr / Tape ------------------------------------------------------------------

const Matrix& Expr::value() const {
  if (!valid()) throw std::invalid_argument("value of an invalid expression");
  return tape_->value(*this);
}

double Expr::scalar() const {
  const Matrix& v = value();
  if (v.size() != 1) throw ShapeError("scalar() on a " + shape(v) + " value");
  return v(0, 0);
}

int Tape::check(const Expr& e) const {
  if (e.tape_ != this || e.id_ < 0 || e.id_ >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("expression is not on this tape");
  return e.id_;
}

Expr Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Expr(this, static_cast<int>(nodes_.size()) - 1);
}

Expr Tape::param(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Expr(this, it->second);
  Node n;
  n.value = p.value;
  n.requires_grad = p.trainable;
  n.param = &p;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(&p, id);
  return Expr(this, id);
}

Expr Tape::record(Matrix value, std::initializer_list<Expr> args, BackwardFn fn) {
  bool rg = false;
  for (const auto& a : args) rg = rg || nodes_[static_cast<std::size_t>(check(a))].requires_grad;
  return record_leaf(std::move(value), rg, rg ? std::move(fn) : BackwardFn());
}

Expr Tape::record(Matrix value, const std::vector<Expr>& args, BackwardFn fn) {
  bool rg = false;
  for (const auto& a : args) rg = rg || nodes_[static_cast<std::size_t>(check(a))].requires_grad;
  return record_leaf(std::move(value), rg, rg ? std::move(fn) : BackwardFn());
}

Expr Tape::record_leaf(Matrix value, bool requires_grad, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Expr(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix& Tape::grad_of(const Expr& e) {
  Node& n = nodes_[static_cast<std::size_t>(check(e))];
  if (!n.has_grad) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(const Expr& loss) {
  if (loss.tape_ != this) throw std::invalid_argument("backward: loss is detached from this tape");
  const int root = check(loss);
  if (nodes_[static_cast<std::size_t>(root)].value.size() != 1)
    throw ShapeError("backward: loss must be scalar, got " + shape(nodes_[static_cast<std::size_t>(root)].value));
  if (backward_done_) throw std::logic_error("backward: tape already differentiated");
  backward_done_ = true;
  if (!nodes_[static_cast<std::size_t>(root)].requires_grad) return;
  grad_of(loss).setOnes();
  for (int i = root; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.has_grad) continue;
    if (n.backward) n.backward(*this, n.value, n.grad);
    if (n.param && n.param->trainable) n.param->grad += n.grad;
  }
}

// ---- primitives ---------------------------------------------------------------------

Expr matmul(const Expr& a, const Expr& b) {
  Tape& t = same_tape(a, b, "matmul");
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (A.cols() != B.rows()) shape_error("matmul", shape(A) + " * " + shape(B));
  return t.record(A * B, {a, b}, [a, b](Tape& t, const Matrix&, const Matrix& g) {
    if (t.requires_grad(a)) t.grad_of(a).noalias() += g * t.value(b).transpose();
    if (t.requires_grad(b)) t.grad_of(b).noalias() += t.value(a).transpose() * g;
  });
}

namespace {

Expr add_impl(const Expr& a, const Expr& b, double sign, const char* op) {
  Tape& t = same_tape(a, b, op);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (A.rows() == B.rows() && A.cols() == B.cols()) {
    Matrix out = sign > 0 ? Matrix(A + B) : Matrix(A - B);
    return t.record(std::move(out), {a, b}, [a, b, sign](Tape& t, const Matrix&, const Matrix& g) {
      if (t.requires_grad(a)) t.grad_of(a) += g;
      if (t.requires_grad(b)) t.grad_of(b) += sign * g;
    });
  }
  if (B.rows() == 1 && B.cols() == A.cols()) {
    Matrix out = A;
    out.rowwise() += sign * B.row(0);
    return t.record(std::move(out), {a, b}, [a, b, sign](Tape& t, const Matrix&, const Matrix& g) {
      if (t.requires_grad(a)) t.grad_of(a) += g;
      if (t.requires_grad(b)) t.grad_of(b) += sign * g.colwise().sum();
    });
  }
  shape_error(op, shape(A) + " and " + shape(B));
}

}  // namespace

Expr add(const Expr& a, const Expr& b) { return add_impl(a, b, 1.0, "add"); }
Expr sub(const Expr& a, const Expr& b) { return add_impl(a, b, -1.0, "sub"); }

Expr cmult(const Expr& a, const Expr& b) {
  Tape& t = same_tape(a, b, "cmult");
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (A.rows() != B.rows() || A.cols() != B.cols()) shape_error("cmult", shape(A) + " and " + shape(B));
  return t.record(A.cwiseProduct(B), {a, b}, [a, b](Tape& t, const Matrix&, const Matrix& g) {
    if (t.requires_grad(a)) t.grad_of(a) += g.cwiseProduct(t.value(b));
    if (t.requires_grad(b)) t.grad_of(b) += g.cwiseProduct(t.value(a));
  });
}

Expr scale(const Expr& a, double c) {
  Tape& t = tape_of(a, "scale");
  return t.record(c * a.value(), {a}, [a, c](Tape& t, const Matrix&, const Matrix& g) { t.grad_of(a) += c * g; });
}

Expr concat_cols(const std::vector<Expr>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  Tape& t = tape_of(parts[0], "concat_cols");
  const Eigen::Index r = parts[0].rows();
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    if (&tape_of(p, "concat_cols") != &t) throw std::invalid_argument("concat_cols: mixed tapes");
    if (p.rows() != r) shape_error("concat_cols", std::to_string(r) + " rows vs " + shape(p.value()));
    c += p.cols();
  }
  Matrix out(r, c);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return t.record(std::move(out), parts, [parts](Tape& t, const Matrix&, const Matrix& g) {
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      const Eigen::Index w = t.value(p).cols();
      if (t.requires_grad(p)) t.grad_of(p) += g.middleCols(off, w);
      off += w;
    }
  });
}

Expr concat_rows(const std::vector<Expr>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  Tape& t = tape_of(parts[0], "concat_rows");
  const Eigen::Index c = parts[0].cols();
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    if (&tape_of(p, "concat_rows") != &t) throw std::invalid_argument("concat_rows: mixed tapes");
    if (p.cols() != c) shape_error("concat_rows", std::to_string(c) + " cols vs " + shape(p.value()));
    r += p.rows();
  }
  Matrix out(r, c);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    out.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return t.record(std::move(out), parts, [parts](Tape& t, const Matrix&, const Matrix& g) {
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      const Eigen::Index h = t.value(p).rows();
      if (t.requires_grad(p)) t.grad_of(p) += g.middleRows(off, h);
      off += h;
    }
  });
}

Expr slice_cols(const Expr& a, int start, int count) {
  Tape& t = tape_of(a, "slice_cols");
  if (start < 0 || count < 0 || start + count > a.cols())
    shape_error("slice_cols", "[" + std::to_string(start) + ", +" + std::to_string(count) + ") of " + shape(a.value()));
  return t.record(a.value().middleCols(start, count), {a}, [a, start, count](Tape& t, const Matrix&, const Matrix& g) {
    t.grad_of(a).middleCols(start, count) += g;
  });
}

Expr slice_rows(const Expr& a, int start, int count) {
  Tape& t = tape_of(a, "slice_rows");
  if (start < 0 || count < 0 || start + count > a.rows())
    shape_error("slice_rows", "[" + std::to_string(start) + ", +" + std::to_string(count) + ") of " + shape(a.value()));
  return t.record(a.value().middleRows(start, count), {a}, [a, start, count](Tape& t, const Matrix&, const Matrix& g) {
    t.grad_of(a).middleRows(start, count) += g;
  });
}

Expr select_rows(const Expr& a, const std::vector<int>& rows) {
  Tape& t = tape_of(a, "select_rows");
  const Matrix& A = a.value();
  Matrix out(static_cast<Eigen::Index>(rows.size()), A.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= A.rows())
      shape_error("select_rows", "row " + std::to_string(rows[k]) + " of " + shape(A));
    out.row(static_cast<Eigen::Index>(k)) = A.row(rows[k]);
  }
  return t.record(std::move(out), {a}, [a, rows](Tape& t, const Matrix&, const Matrix& g) {
    Matrix& ga = t.grad_of(a);
    for (std::size_t k = 0; k < rows.size(); ++k) ga.row(rows[k]) += g.row(static_cast<Eigen::Index>(k));
  });
}

Expr transpose(const Expr& a) {
  Tape& t = tape_of(a, "transpose");
  return t.record(a.value().transpose(), {a},
                  [a](Tape& t, const Matrix&, const Matrix& g) { t.grad_of(a) += g.transpose(); });
}

Expr sigmoid(const Expr& a) {
  Tape& t = tape_of(a, "sigmoid");
  Matrix y = a.value().unaryExpr([](double x) { return stable_sigmoid(x); });
  return t.record(std::move(y), {a}, [a](Tape& t, const Matrix& y, const Matrix& g) {
    t.grad_of(a).array() += g.array() * y.array() * (1.0 - y.array());
  });
}

Expr tanh(const Expr& a) {
  Tape& t = tape_of(a, "tanh");
  Matrix y = a.value().array().tanh().matrix();
  return t.record(std::move(y), {a}, [a](Tape& t, const Matrix& y, const Matrix& g) {
    t.grad_of(a).array() += g.array() * (1.0 - y.array().square());
  });
}

Expr softmax_rows(const Expr& a) {
  Tape& t = tape_of(a, "softmax_rows");
  const Matrix& A = a.value();
  Matrix y(A.rows(), A.cols());
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    const double mx = A.row(r).maxCoeff();
    y.row(r) = (A.row(r).array() - mx).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  return t.record(std::move(y), {a}, [a](Tape& t, const Matrix& y, const Matrix& g) {
    Matrix& ga = t.grad_of(a);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const double dot = g.row(r).dot(y.row(r));
      ga.row(r).array() += y.row(r).array() * (g.row(r).array() - dot);
    }
  });
}

Expr lookup(Tape& t, Parameter& table, const std::vector<int>& ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), table.value.cols());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || ids[k] >= table.value.rows())
      throw std::out_of_range("lookup: id " + std::to_string(ids[k]) + " outside table '" + table.name +
                              "' of " + std::to_string(table.value.rows()) + " rows");
    out.row(static_cast<Eigen::Index>(k)) = table.value.row(ids[k]);
  }
  Parameter* p = &table;
  return t.record_leaf(std::move(out), table.trainable, [p, ids](Tape&, const Matrix&, const Matrix& g) {
    for (std::size_t k = 0; k < ids.size(); ++k) p->grad.row(ids[k]) += g.row(static_cast<Eigen::Index>(k));
  });
}

Expr bilinear(const Expr& x, const Expr& w, const Expr& y) {
  Tape& t = same_tape(x, w, "bilinear");
  same_tape(x, y, "bilinear");
  const Matrix& X = x.value();
  const Matrix& W = w.value();
  const Matrix& Y = y.value();
  if (X.cols() != W.rows() || Y.cols() != W.cols())
    shape_error("bilinear", shape(X) + " x " + shape(W) + " x " + shape(Y) + "^T");
  Matrix xw = X * W;
  Matrix out = xw * Y.transpose();
  return t.record(std::move(out), {x, w, y}, [x, w, y](Tape& t, const Matrix&, const Matrix& g) {
    const Matrix& X = t.value(x);
    const Matrix& W = t.value(w);
    const Matrix& Y = t.value(y);
    const Matrix gy = g * Y;  // r x e
    if (t.requires_grad(x)) t.grad_of(x).noalias() += gy * W.transpose();
    if (t.requires_grad(w)) t.grad_of(w).noalias() += X.transpose() * gy;
    if (t.requires_grad(y)) t.grad_of(y).noalias() += g.transpose() * (X * W);
  });
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout probability must be in [0, 1)");
  Matrix mask(rows, cols);
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform() < p ? 0.0 : keep;
  return mask;
}

Expr dropout(const Expr& a, double p, Rng& rng) {
  if (p == 0.0) return a;
  Tape& t = tape_of(a, "dropout");
  return cmult(a, t.constant(dropout_mask(a.rows(), a.cols(), p, rng)));
}

Expr sum(const Expr& a) {
  Tape& t = tape_of(a, "sum");
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.record(std::move(out), {a}, [a](Tape& t, const Matrix&, const Matrix& g) {
    t.grad_of(a).array() += g(0, 0);
  });
}

Expr mean(const Expr& a) {
  const auto n = a.value().size();
  if (n == 0) throw ShapeError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Expr sigmoid_xent(const Expr& logits, const Matrix& targets, const Matrix& weights) {
  Tape& t = tape_of(logits, "sigmoid_xent");
  const Matrix& S = logits.value();
  if (targets.rows() != S.rows() || targets.cols() != S.cols() || weights.rows() != S.rows() ||
      weights.cols() != S.cols())
    shape_error("sigmoid_xent", "logits " + shape(S) + ", targets " + shape(targets) + ", weights " + shape(weights));
  double total = 0.0;
  for (Eigen::Index i = 0; i < S.size(); ++i) {
    const double w = weights.data()[i];
    if (w == 0.0) continue;
    const double s = S.data()[i];
    total += w * (softplus(s) - targets.data()[i] * s);
  }
  Matrix out(1, 1);
  out(0, 0) = total;
  return t.record(std::move(out), {logits}, [logits, targets, weights](Tape& t, const Matrix&, const Matrix& g) {
    Matrix& gs = t.grad_of(logits);
    const Matrix& S = t.value(logits);
    for (Eigen::Index i = 0; i < S.size(); ++i) {
      const double w = weights.data()[i];
      if (w == 0.0) continue;
      gs.data()[i] += g(0, 0) * w * (stable_sigmoid(S.data()[i]) - targets.data()[i]);
    }
  });
}

Expr softmax_xent(const Expr& logits, const std::vector<int>& targets, const Matrix* allowed) {
  Tape& t = tape_of(logits, "softmax_xent");
  const Matrix& S = logits.value();
  if (static_cast<Eigen::Index>(targets.size()) != S.rows())
    shape_error("softmax_xent", std::to_string(targets.size()) + " targets for " + shape(S));
  if (allowed && (allowed->rows() != S.rows() || allowed->cols() != S.cols()))
    shape_error("softmax_xent", "allowed " + shape(*allowed) + " for " + shape(S));
  // Probabilities (zero outside allowed) saved for the backward pass.
  Matrix prob = Matrix::Zero(S.rows(), S.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < S.rows(); ++r) {
    const int tgt = targets[static_cast<std::size_t>(r)];
    if (tgt < 0) continue;
    if (tgt >= S.cols() || (allowed && (*allowed)(r, tgt) == 0.0))
      throw std::invalid_argument("softmax_xent: target " + std::to_string(tgt) + " not an allowed class in row " +
                                  std::to_string(r));
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < S.cols(); ++c)
      if (!allowed || (*allowed)(r, c) != 0.0) mx = std::max(mx, S(r, c));
    double z = 0.0;
    for (Eigen::Index c = 0; c < S.cols(); ++c) {
      if (allowed && (*allowed)(r, c) == 0.0) continue;
      prob(r, c) = std::exp(S(r, c) - mx);
      z += prob(r, c);
    }
    prob.row(r) /= z;
    total += std::log(z) + mx - S(r, tgt);
  }
  Matrix out(1, 1);
  out(0, 0) = total;
  return t.record(std::move(out), {logits},
                  [logits, targets, prob = std::move(prob)](Tape& t, const Matrix&, const Matrix& g) {
                    Matrix& gs = t.grad_of(logits);
                    for (Eigen::Index r = 0; r < prob.rows(); ++r) {
                      const int tgt = targets[static_cast<std::size_t>(r)];
                      if (tgt < 0) continue;
                      gs.row(r) += g(0, 0) * prob.row(r);
                      gs(r, tgt) -= g(0, 0);
                    }
                  });
}

Expr pick_cells(const std::vector<Expr>& mats, const std::vector<std::pair<int, int>>& cells) {
  if (mats.empty()) throw std::invalid_argument("pick_cells: no inputs");
  Tape& t = tape_of(mats[0], "pick_cells");
  for (const auto& m : mats) {
    if (&tape_of(m, "pick_cells") != &t) throw std::invalid_argument("pick_cells: mixed tapes");
    if (m.rows() != mats[0].rows() || m.cols() != mats[0].cols())
      shape_error("pick_cells", shape(m.value()) + " vs " + shape(mats[0].value()));
  }
  Matrix out(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(mats.size()));
  for (std::size_t e = 0; e < cells.size(); ++e) {
    const auto [r, c] = cells[e];
    if (r < 0 || c < 0 || r >= mats[0].rows() || c >= mats[0].cols())
      shape_error("pick_cells", "cell (" + std::to_string(r) + "," + std::to_string(c) + ") of " + shape(mats[0].value()));
    for (std::size_t k = 0; k < mats.size(); ++k)
      out(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(k)) = mats[k].value()(r, c);
  }
  return t.record(std::move(out), mats, [mats, cells](Tape& t, const Matrix&, const Matrix& g) {
    for (std::size_t k = 0; k < mats.size(); ++k) {
      if (!t.requires_grad(mats[k])) continue;
      Matrix& gm = t.grad_of(mats[k]);
      for (std::size_t e = 0; e < cells.size(); ++e)
        gm(cells[e].first, cells[e].second) += g(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(k));
    }
  });
}

// ---- gradient check ---------------------------------------------------------------------

GradCheckReport gradient_check(const std::function<Expr(Tape&)>& loss_fn,
                               const std::vector<Parameter*>& params, const GradCheckOptions& opt) {
  auto eval = [&]() {
    Tape t;
    return loss_fn(t).scalar();
  };
  const double base = eval();
  const double again = eval();
  if (!(base == again))
    throw NonDeterministicError("gradient_check: two forward passes disagree (" + std::to_string(base) + " vs " +
                                std::to_string(again) + "); freeze dropout masks");

  for (Parameter* p : params) p->zero_grad();
  {
    Tape t;
    Expr loss = loss_fn(t);
    t.backward(loss);
  }
  GradCheckReport rep;
  rep.tolerance = opt.tolerance;
  Rng rng(opt.seed);
  for (Parameter* p : params) {
    const Matrix analytic = p->grad;
    std::vector<Eigen::Index> coords;
    const Eigen::Index size = p->value.size();
    if (opt.max_coords > 0 && size > opt.max_coords) {
      for (int k = 0; k < opt.max_coords; ++k) coords.push_back(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(size))));
    } else {
      for (Eigen::Index i = 0; i < size; ++i) coords.push_back(i);
    }
    for (Eigen::Index i : coords) {
      double& x = p->value.data()[i];
      const double orig = x;
      x = orig + opt.epsilon;
      const double up = eval();
      x = orig - opt.epsilon;
      const double down = eval();
      x = orig;
      const double numeric = (up - down) / (2.0 * opt.epsilon);
      const double a = analytic.data()[i];
      const double abs_err = std::abs(a - numeric);
      const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), opt.floor});
      rep.max_abs_error = std::max(rep.max_abs_error, abs_err);
      if (rel > rep.max_rel_error || rep.worst_index < 0) {
        rep.max_rel_error = std::max(rel, rep.max_rel_error);
        if (rel >= rep.max_rel_error) {
          rep.worst_param = p->name;
          rep.worst_index = i;
        }
      }
      ++rep.coords_checked;
    }
    p->zero_grad();
  }
  rep.passed = rep.max_rel_error <= opt.tolerance;
  return rep;
}

}  // namespace xsdp::ad
