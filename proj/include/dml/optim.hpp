#pragma once

// Named parameters, per-step tape binding, and first-order optimizers.
//
// Training loops here rebuild the graph every step: a ParamStore owns the
// persistent parameter values; a StepContext binds them onto a fresh Tape as
// tracked variables; after backward() the context yields one GradEntry per
// stored parameter (zeros for parameters that never touched the loss), and an
// optimizer applies the update in place.

#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dml/tensor.hpp"

namespace dml {

struct Param {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> value;
};

class ParamStore {
 public:
  Param& add(std::string name, const Tensor& init) {
    if (contains(name)) throw std::invalid_argument("ParamStore: duplicate parameter '" + name + "'");
    params_.push_back(Param{std::move(name), init.shape, init.values});
    return params_.back();
  }

  bool contains(const std::string& name) const {
    for (const Param& p : params_)
      if (p.name == name) return true;
    return false;
  }

  Param& at(const std::string& name) {
    for (Param& p : params_)
      if (p.name == name) return p;
    throw std::invalid_argument("ParamStore: unknown parameter '" + name + "'");
  }

  const Param& at(const std::string& name) const {
    return const_cast<ParamStore*>(this)->at(name);
  }

  std::deque<Param>& all() { return params_; }
  const std::deque<Param>& all() const { return params_; }

 private:
  std::deque<Param> params_;  // deque: stable addresses, insertion order kept
};

struct GradEntry {
  std::string name;
  std::vector<double>* value;
  std::vector<double> grad;
};

class StepContext {
 public:
  StepContext(Tape& tape, ParamStore& store) : tape_(&tape), store_(&store) {}

  // Bind a stored parameter onto this step's tape. Binding the same name twice
  // returns the same tracked tensor, so shared uses accumulate gradient.
  Tensor operator[](const std::string& name) {
    auto it = bound_.find(name);
    if (it != bound_.end()) return it->second;
    Param& p = store_->at(name);
    Tensor init;
    init.shape = p.shape;
    init.values = p.value;
    Tensor t = tape_->variable(init, p.name);
    bound_.emplace(name, t);
    return t;
  }

  // Call after tape.backward(). Every parameter in the store gets an entry;
  // unbound or off-path parameters get zero gradients.
  std::vector<GradEntry> grads() const {
    std::vector<GradEntry> out;
    for (Param& p : store_->all()) {
      GradEntry e{p.name, &p.value, {}};
      auto it = bound_.find(p.name);
      if (it != bound_.end())
        e.grad = tape_->grad(it->second);
      else
        e.grad.assign(p.value.size(), 0.0);
      out.push_back(std::move(e));
    }
    return out;
  }

 private:
  Tape* tape_;
  ParamStore* store_;
  std::map<std::string, Tensor> bound_;
};

namespace detail {
inline void check_finite(const std::vector<GradEntry>& entries) {
  for (const auto& e : entries)
    for (double g : e.grad)
      if (!std::isfinite(g))
        throw std::runtime_error("optimizer: non-finite gradient for parameter '" + e.name + "'");
}
}  // namespace detail

class Sgd {
 public:
  explicit Sgd(double lr) : lr_(lr) {}

  void step(const std::vector<GradEntry>& entries) {
    detail::check_finite(entries);
    for (const auto& e : entries) {
      if (e.grad.size() != e.value->size())
        throw std::invalid_argument("Sgd: gradient size mismatch for '" + e.name + "'");
      for (std::size_t i = 0; i < e.grad.size(); ++i) (*e.value)[i] -= lr_ * e.grad[i];
    }
  }

 private:
  double lr_;
};

class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<GradEntry>& entries) {
    detail::check_finite(entries);
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (const auto& e : entries) {
      if (e.grad.size() != e.value->size())
        throw std::invalid_argument("Adam: gradient size mismatch for '" + e.name + "'");
      State& s = state_[e.name];
      if (s.m.empty()) {
        s.m.assign(e.grad.size(), 0.0);
        s.v.assign(e.grad.size(), 0.0);
      } else if (s.m.size() != e.grad.size()) {
        throw std::invalid_argument("Adam: state size changed for '" + e.name + "'");
      }
      for (std::size_t i = 0; i < e.grad.size(); ++i) {
        const double g = e.grad[i];
        s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * g;
        s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * g * g;
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        (*e.value)[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

  long step_count() const { return t_; }

 private:
  struct State {
    std::vector<double> m, v;
  };
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::map<std::string, State> state_;
};

}  // namespace dml
