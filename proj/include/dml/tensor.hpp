#pragma once

// Reverse-mode autodiff over dense row-major tensors of double.
//
// A Tape records one computation graph. Parameters enter via Tape::variable,
// every op that touches a tracked tensor appends a node, and backward() from a
// scalar loss fills per-node gradient buffers in reverse recording order.
// Subgradient conventions: relu'(0) = 0, clamp_max gradient at the boundary is
// 0, min/max reductions route their gradient to the lowest winning index.
// A tape and its tensors are a single-threaded unit of work; independent tapes
// may run concurrently.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dml {

class Tape;

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;
  Tape* tape = nullptr;
  int node = -1;

  bool tracked() const { return tape != nullptr; }
  std::size_t size() const { return values.size(); }
  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double item() const {
    if (values.size() != 1) throw std::invalid_argument("item(): tensor is not scalar");
    return values[0];
  }

  static Tensor scalar(double v) { return Tensor{{}, {v}, nullptr, -1}; }

  static Tensor vector(std::vector<double> v) {
    Tensor t;
    t.shape = {v.size()};
    t.values = std::move(v);
    return t;
  }

  static Tensor matrix(std::size_t r, std::size_t c, std::vector<double> v) {
    if (v.size() != r * c) throw std::invalid_argument("matrix(): data size does not match shape");
    Tensor t;
    t.shape = {r, c};
    t.values = std::move(v);
    return t;
  }

  static Tensor zeros(std::vector<std::size_t> shape) {
    Tensor t;
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    t.shape = std::move(shape);
    t.values.assign(n, 0.0);
    return t;
  }
};

class Tape {
 public:
  using BackFn = std::function<void(const std::vector<double>&, Tape&)>;

  struct Node {
    std::size_t size = 0;
    std::string name;
    BackFn back;  // null for leaves
  };

  Tensor variable(const Tensor& init, std::string name = "") {
    Tensor t = init;
    t.tape = this;
    t.node = add_node(t.size(), std::move(name), nullptr);
    return t;
  }

  int add_node(std::size_t size, std::string name, BackFn back) {
    nodes_.push_back(Node{size, std::move(name), std::move(back)});
    return static_cast<int>(nodes_.size()) - 1;
  }

  void backward(const Tensor& loss) {
    if (loss.tape != this || loss.node < 0)
      throw std::invalid_argument("backward(): loss is not tracked on this tape");
    if (loss.size() != 1) throw std::invalid_argument("backward(): loss must be scalar");
    if (ran_backward_) throw std::logic_error("backward(): already run on this tape; build a fresh tape");
    ran_backward_ = true;
    grads_.resize(nodes_.size());
    touched_.assign(nodes_.size(), 0);
    grads_[loss.node].assign(1, 1.0);
    touched_[loss.node] = 1;
    for (int i = loss.node; i >= 0; --i) {
      if (!touched_[i] || !nodes_[i].back) continue;
      nodes_[i].back(grads_[i], *this);
    }
  }

  const std::vector<double>& grad(const Tensor& t) const {
    if (t.tape != this || t.node < 0) throw std::invalid_argument("grad(): tensor is not tracked on this tape");
    if (!ran_backward_) throw std::logic_error("grad(): backward() has not run");
    if (!touched_[t.node]) {
      static thread_local std::vector<double> zeros;
      zeros.assign(t.size(), 0.0);
      return zeros;
    }
    return grads_[t.node];
  }

  // Accumulate into a node's gradient buffer (used by op backward closures).
  std::vector<double>& accum(int node, std::size_t size) {
    if (!touched_[node]) {
      grads_[node].assign(size, 0.0);
      touched_[node] = 1;
    }
    return grads_[node];
  }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
  std::vector<std::vector<double>> grads_;
  std::vector<char> touched_;
  bool ran_backward_ = false;
};

namespace detail {

inline Tape* result_tape(const Tensor& a, const Tensor& b) {
  if (a.tape && b.tape && a.tape != b.tape)
    throw std::invalid_argument("operands live on different tapes");
  return a.tape ? a.tape : b.tape;
}

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape != b.shape)
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

// Binary elementwise with scalar broadcast. dfn(a, b, g) -> {da, db}.
template <typename F, typename D>
Tensor binary_op(const char* name, const Tensor& a, const Tensor& b, F fn, D dfn) {
  const bool a_scalar = a.size() == 1;
  const bool b_scalar = b.size() == 1;
  if (!a_scalar && !b_scalar) check_same_shape(a, b, name);
  Tensor out;
  out.shape = a_scalar ? b.shape : a.shape;
  const std::size_t n = a_scalar ? b.size() : a.size();
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = fn(a.values[a_scalar ? 0 : i], b.values[b_scalar ? 0 : i]);
  Tape* tape = result_tape(a, b);
  if (!tape) return out;
  out.tape = tape;
  const int pa = a.node, pb = b.node;
  const std::size_t na = a.size(), nb = b.size();
  std::vector<double> av = a.values, bv = b.values;
  out.node = tape->add_node(n, name, [=](const std::vector<double>& g, Tape& t) {
    std::vector<double>* ga = pa >= 0 ? &t.accum(pa, na) : nullptr;
    std::vector<double>* gb = pb >= 0 ? &t.accum(pb, nb) : nullptr;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto [da, db] = dfn(av[a_scalar ? 0 : i], bv[b_scalar ? 0 : i], g[i]);
      if (ga) (*ga)[a_scalar ? 0 : i] += da;
      if (gb) (*gb)[b_scalar ? 0 : i] += db;
    }
  });
  return out;
}

// Unary elementwise. dfn(a, out, g) -> da.
template <typename F, typename D>
Tensor unary_op(const char* name, const Tensor& a, F fn, D dfn) {
  Tensor out;
  out.shape = a.shape;
  out.values.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = fn(a.values[i]);
  if (!a.tape) return out;
  out.tape = a.tape;
  const int pa = a.node;
  const std::size_t na = a.size();
  std::vector<double> av = a.values, ov = out.values;
  out.node = a.tape->add_node(out.size(), name, [=](const std::vector<double>& g, Tape& t) {
    auto& ga = t.accum(pa, na);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += dfn(av[i], ov[i], g[i]);
  });
  return out;
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) {
  return detail::binary_op(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double g) { return std::pair<double, double>{g, g}; });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  return detail::binary_op(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double g) { return std::pair<double, double>{g, -g}; });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  return detail::binary_op(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double x, double y, double g) { return std::pair<double, double>{g * y, g * x}; });
}

inline Tensor divide(const Tensor& a, const Tensor& b) {
  for (double y : b.values)
    if (y == 0.0) throw std::domain_error("divide: division by zero");
  return detail::binary_op(
      "divide", a, b, [](double x, double y) { return x / y; },
      [](double x, double y, double g) {
        return std::pair<double, double>{g / y, -g * x / (y * y)};
      });
}

inline Tensor relu(const Tensor& a) {
  return detail::unary_op(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double, double g) { return x > 0.0 ? g : 0.0; });
}

inline Tensor sigmoid(const Tensor& a) {
  return detail::unary_op(
      "sigmoid", a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double o, double g) { return g * o * (1.0 - o); });
}

inline Tensor tanh_op(const Tensor& a) {
  return detail::unary_op(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double o, double g) { return g * (1.0 - o * o); });
}

inline Tensor log_op(const Tensor& a) {
  for (double x : a.values)
    if (x <= 0.0) throw std::domain_error("log: operand must be positive");
  return detail::unary_op(
      "log", a, [](double x) { return std::log(x); },
      [](double x, double, double g) { return g / x; });
}

inline Tensor exp_op(const Tensor& a) {
  return detail::unary_op(
      "exp", a, [](double x) { return std::exp(x); },
      [](double, double o, double g) { return g * o; });
}

inline Tensor abs_op(const Tensor& a) {
  return detail::unary_op(
      "abs", a, [](double x) { return std::fabs(x); },
      [](double x, double, double g) { return x > 0.0 ? g : (x < 0.0 ? -g : 0.0); });
}

inline Tensor clamp_max(const Tensor& a, double limit) {
  return detail::unary_op(
      "clamp_max", a, [=](double x) { return x < limit ? x : limit; },
      [=](double x, double, double g) { return x < limit ? g : 0.0; });
}

inline Tensor reshape(const Tensor& a, std::vector<std::size_t> shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  if (n != a.size()) throw std::invalid_argument("reshape: element count mismatch");
  Tensor out = a;
  out.shape = std::move(shape);
  if (!a.tape) return out;
  const int pa = a.node;
  const std::size_t na = a.size();
  out.node = a.tape->add_node(n, "reshape", [=](const std::vector<double>& g, Tape& t) {
    auto& ga = t.accum(pa, na);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
  return out;
}

namespace detail {

enum class Reduce { Min, Max, Sum, Mean };

inline Tensor reduce(const char* name, Reduce kind, const Tensor& a, std::optional<int> axis) {
  if (a.size() == 0) throw std::invalid_argument(std::string(name) + ": empty tensor");
  if (axis && a.shape.size() != 2)
    throw std::invalid_argument(std::string(name) + ": axis reduction requires a matrix");
  if (axis && *axis != 0 && *axis != 1)
    throw std::invalid_argument(std::string(name) + ": axis must be 0 or 1");

  const std::size_t r = a.rows(), c = a.cols();
  // Slices: axis==0 reduces down columns (c outputs), axis==1 across rows (r outputs),
  // no axis reduces everything (1 output). element(o,k) = o*out_stride + k*k_stride.
  const std::size_t n_out = axis ? (*axis == 0 ? c : r) : 1;
  const std::size_t slice_len = axis ? (*axis == 0 ? r : c) : a.size();
  const std::size_t out_stride = axis ? (*axis == 0 ? 1 : c) : 0;
  const std::size_t k_stride = (axis && *axis == 0) ? c : 1;

  auto element = [=](std::size_t out_i, std::size_t k) -> std::size_t {
    return out_i * out_stride + k * k_stride;
  };

  Tensor out;
  out.shape = axis ? std::vector<std::size_t>{n_out} : std::vector<std::size_t>{};
  out.values.resize(n_out);
  std::vector<std::size_t> argidx(kind == Reduce::Min || kind == Reduce::Max ? n_out : 0);

  for (std::size_t o = 0; o < n_out; ++o) {
    if (kind == Reduce::Sum || kind == Reduce::Mean) {
      double s = 0.0;
      for (std::size_t k = 0; k < slice_len; ++k) s += a.values[element(o, k)];
      out.values[o] = kind == Reduce::Mean ? s / static_cast<double>(slice_len) : s;
    } else {
      std::size_t best = 0;
      double bv = a.values[element(o, 0)];
      for (std::size_t k = 1; k < slice_len; ++k) {
        double v = a.values[element(o, k)];
        if (kind == Reduce::Min ? v < bv : v > bv) {
          bv = v;
          best = k;
        }
      }
      out.values[o] = bv;
      argidx[o] = best;
    }
  }

  if (!a.tape) return out;
  out.tape = a.tape;
  const int pa = a.node;
  const std::size_t na = a.size();
  out.node = a.tape->add_node(n_out, name, [=](const std::vector<double>& g, Tape& t) {
    auto& ga = t.accum(pa, na);
    for (std::size_t o = 0; o < n_out; ++o) {
      if (kind == Reduce::Sum) {
        for (std::size_t k = 0; k < slice_len; ++k) ga[element(o, k)] += g[o];
      } else if (kind == Reduce::Mean) {
        const double gs = g[o] / static_cast<double>(slice_len);
        for (std::size_t k = 0; k < slice_len; ++k) ga[element(o, k)] += gs;
      } else {
        ga[element(o, argidx[o])] += g[o];
      }
    }
  });
  return out;
}

}  // namespace detail

inline Tensor reduce_min(const Tensor& a, std::optional<int> axis = {}) {
  return detail::reduce("reduce_min", detail::Reduce::Min, a, axis);
}
inline Tensor reduce_max(const Tensor& a, std::optional<int> axis = {}) {
  return detail::reduce("reduce_max", detail::Reduce::Max, a, axis);
}
inline Tensor reduce_sum(const Tensor& a, std::optional<int> axis = {}) {
  return detail::reduce("reduce_sum", detail::Reduce::Sum, a, axis);
}
inline Tensor reduce_mean(const Tensor& a, std::optional<int> axis = {}) {
  return detail::reduce("reduce_mean", detail::Reduce::Mean, a, axis);
}

// matmul: [m,k]x[k,n] -> [m,n]; a [m,k] with b [k] -> [m].
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape.size() != 2) throw std::invalid_argument("matmul: left operand must be a matrix");
  const bool b_vec = b.shape.size() == 1;
  if (!b_vec && b.shape.size() != 2)
    throw std::invalid_argument("matmul: right operand must be a matrix or vector");
  const std::size_t m = a.shape[0], k = a.shape[1];
  const std::size_t n = b_vec ? 1 : b.shape[1];
  if ((b_vec ? b.shape[0] : b.shape[0]) != k)
    throw std::invalid_argument("matmul: inner dimensions do not match");

  Tensor out;
  out.shape = b_vec ? std::vector<std::size_t>{m} : std::vector<std::size_t>{m, n};
  out.values.assign(m * n, 0.0);
  {
    const double* A = a.values.data();
    const double* B = b.values.data();
    double* C = out.values.data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        const double aip = A[i * k + p];
        const double* Bp = B + p * n;
        double* Ci = C + i * n;
        for (std::size_t j = 0; j < n; ++j) Ci[j] += aip * Bp[j];
      }
  }

  Tape* tape = detail::result_tape(a, b);
  if (!tape) return out;
  out.tape = tape;
  const int pa = a.node, pb = b.node;
  std::vector<double> av = a.values, bv = b.values;
  out.node = tape->add_node(m * n, "matmul", [=](const std::vector<double>& g, Tape& t) {
    if (pa >= 0) {
      auto& ga = t.accum(pa, m * k);
      // dA = g x B^T
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          const double* gi = g.data() + i * n;
          const double* Bp = bv.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) s += gi[j] * Bp[j];
          ga[i * k + p] += s;
        }
    }
    if (pb >= 0) {
      auto& gb = t.accum(pb, k * n);
      // dB = A^T x g
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = av[i * k + p];
          const double* gi = g.data() + i * n;
          double* gbp = gb.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) gbp[j] += aip * gi[j];
        }
    }
  });
  return out;
}

// softmax over a vector, computed with max subtraction for stability.
inline Tensor softmax(const Tensor& a) {
  if (a.shape.size() != 1) throw std::invalid_argument("softmax: operand must be a vector");
  const std::size_t n = a.size();
  Tensor out;
  out.shape = a.shape;
  out.values.resize(n);
  const double mx = *std::max_element(a.values.begin(), a.values.end());
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = std::exp(a.values[i] - mx);
    z += out.values[i];
  }
  for (auto& v : out.values) v /= z;
  if (!a.tape) return out;
  out.tape = a.tape;
  const int pa = a.node;
  std::vector<double> s = out.values;
  out.node = a.tape->add_node(n, "softmax", [=](const std::vector<double>& g, Tape& t) {
    auto& ga = t.accum(pa, n);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += g[i] * s[i];
    for (std::size_t i = 0; i < n; ++i) ga[i] += s[i] * (g[i] - dot);
  });
  return out;
}

// Concatenated embedding pairs: E [n,d] -> [n*n, 2d], row i*n+j = (E_i | E_j).
inline Tensor pair_concat(const Tensor& e) {
  if (e.shape.size() != 2) throw std::invalid_argument("pair_concat: operand must be a matrix");
  const std::size_t n = e.shape[0], d = e.shape[1];
  Tensor out;
  out.shape = {n * n, 2 * d};
  out.values.resize(n * n * 2 * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double* row = out.values.data() + (i * n + j) * 2 * d;
      for (std::size_t x = 0; x < d; ++x) row[x] = e.values[i * d + x];
      for (std::size_t x = 0; x < d; ++x) row[d + x] = e.values[j * d + x];
    }
  if (!e.tape) return out;
  out.tape = e.tape;
  const int pa = e.node;
  out.node = e.tape->add_node(out.size(), "pair_concat", [=](const std::vector<double>& g, Tape& t) {
    auto& ga = t.accum(pa, n * d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double* row = g.data() + (i * n + j) * 2 * d;
        for (std::size_t x = 0; x < d; ++x) ga[i * d + x] += row[x];
        for (std::size_t x = 0; x < d; ++x) ga[j * d + x] += row[d + x];
      }
  });
  return out;
}

}  // namespace dml
