#pragma once

// Kripke structures with learnable accessibility and soft modal operators.
//
// A structure holds W worlds, P propositions, a plain valuation matrix
// V[w][p] in [0,1], and a learnable accessibility parameterization that
// realizes a [W,W] matrix A in [0,1]:
//   - Dense: one logit per ordered world pair, A = sigmoid(logits).
//   - Embedding: per-world vectors fed pairwise through a small MLP,
//     A[i][j] = sigmoid(mlp(e_i, e_j)); scales parameters linearly in W.
//
// Soft modal operators over one proposition's valuation column v:
//   necessity[w]   = min_w' min(1, (1 - A[w,w']) + v[w'])
//   possibility[w] = max_w' A[w,w'] * v[w']
// With crisp A these reduce to "v holds in all / some accessible worlds".

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <dml/fuzzy.hpp>
#include <dml/optim.hpp>
#include <dml/rng.hpp>
#include <dml/tensor.hpp>

namespace dml {

// [rows, n] matrix whose every row is the length-n vector v.
// Implemented as ones[rows,1] x v[1,n] so gradients accumulate back into v.
inline Tensor row_broadcast(const Tensor& v, std::size_t rows) {
  Tensor ones = Tensor::matrix(rows, 1, std::vector<double>(rows, 1.0));
  return matmul(ones, reshape(v, {1, v.size()}));
}

inline void check_modal_args(const Tensor& A, const Tensor& v,
                             const char* op) {
  if (A.shape.size() != 2 || A.rows() != A.cols()) {
    throw std::invalid_argument(std::string(op) +
                                ": accessibility must be square");
  }
  if (v.shape.size() != 1 || v.size() != A.rows()) {
    throw std::invalid_argument(
        std::string(op) + ": valuation length must match world count");
  }
  require_unit_range(A, op);
  require_unit_range(v, op);
}

// Soft "v holds in all worlds accessible from w", one value per world.
inline Tensor necessity(const Tensor& A, const Tensor& v) {
  check_modal_args(A, v, "necessity");
  Tensor rv = row_broadcast(v, A.rows());
  Tensor impl = clamp_max(add(sub(Tensor::scalar(1.0), A), rv), 1.0);
  return reduce_min(impl, 1);
}

// Soft "v holds in some world accessible from w", one value per world.
inline Tensor possibility(const Tensor& A, const Tensor& v) {
  check_modal_args(A, v, "possibility");
  Tensor rv = row_broadcast(v, A.rows());
  return reduce_max(mul(A, rv), 1);
}

// Scaled mean violation of "antecedent -> consequent" over all worlds.
inline Tensor axiom_loss(const Tensor& antecedent, const Tensor& consequent,
                         double lambda) {
  Tensor viol = contradiction_loss(antecedent, consequent);
  return mul(Tensor::scalar(lambda), reduce_mean(viol, std::nullopt));
}

enum class AccessKind { Dense, Embedding };

inline const char* to_string(AccessKind k) {
  return k == AccessKind::Dense ? "dense" : "embedding";
}

class KripkeModel {
 public:
  static constexpr std::size_t kEmbedDim = 8;
  static constexpr std::size_t kHiddenDim = 16;

  KripkeModel(std::vector<std::string> worlds, std::vector<std::string> props,
              AccessKind kind, std::uint64_t seed = 42)
      : worlds_(std::move(worlds)),
        props_(std::move(props)),
        kind_(kind),
        valuation_(worlds_.size() * props_.size(), 0.0) {
    const std::size_t w = worlds_.size();
    if (w == 0) throw std::invalid_argument("KripkeModel: no worlds");
    if (kind_ == AccessKind::Dense) {
      params_.add("A_logits", Tensor::zeros({w, w}));
    } else {
      Rng rng(seed, "kripke-embedding-init");
      std::vector<double> emb(w * kEmbedDim);
      for (double& x : emb) x = rng.normal(0.0, 0.5);
      params_.add("embeddings", Tensor::matrix(w, kEmbedDim, emb));
      auto uniform_fan = [&](std::size_t fan_in, std::size_t count) {
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::vector<double> out(count);
        for (double& x : out) x = rng.uniform(-bound, bound);
        return out;
      };
      params_.add("W1", Tensor::matrix(2 * kEmbedDim, kHiddenDim,
                                       uniform_fan(2 * kEmbedDim,
                                                   2 * kEmbedDim * kHiddenDim)));
      params_.add("b1", Tensor::zeros({kHiddenDim}));
      params_.add("W2", Tensor::matrix(kHiddenDim, 1, uniform_fan(kHiddenDim, kHiddenDim)));
      params_.add("b2", Tensor::zeros({1}));
    }
  }

  std::size_t world_count() const { return worlds_.size(); }
  std::size_t prop_count() const { return props_.size(); }
  const std::vector<std::string>& worlds() const { return worlds_; }
  const std::vector<std::string>& props() const { return props_; }
  AccessKind kind() const { return kind_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  double valuation(std::size_t world, std::size_t prop) const {
    return valuation_.at(world * props_.size() + prop);
  }
  void set_valuation(std::size_t world, std::size_t prop, double value) {
    valuation_.at(world * props_.size() + prop) = value;
  }

  // Realize the accessibility matrix on the context's tape.
  Tensor accessibility(StepContext& ctx) const {
    const std::size_t w = worlds_.size();
    if (kind_ == AccessKind::Dense) {
      return sigmoid(ctx["A_logits"]);
    }
    Tensor pairs = pair_concat(ctx["embeddings"]);  // [w*w, 2d]
    Tensor h = relu(add(matmul(pairs, ctx["W1"]), row_broadcast(ctx["b1"], w * w)));
    Tensor score = add(matmul(h, ctx["W2"]), ctx["b2"]);  // [w*w, 1] + scalar
    return reshape(sigmoid(score), {w, w});
  }

  // Untracked valuation column for one proposition.
  Tensor valuation_column(std::size_t prop) const {
    const std::size_t w = worlds_.size();
    std::vector<double> col(w);
    for (std::size_t i = 0; i < w; ++i) col[i] = valuation(i, prop);
    return Tensor::vector(col);
  }

  Tensor necessity_of(StepContext& ctx, std::size_t prop) const {
    return necessity(accessibility(ctx), valuation_column(prop));
  }
  Tensor possibility_of(StepContext& ctx, std::size_t prop) const {
    return possibility(accessibility(ctx), valuation_column(prop));
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["worlds"] = worlds_;
    j["props"] = props_;
    j["kind"] = to_string(kind_);
    j["valuation"] = valuation_;
    nlohmann::json params = nlohmann::json::object();
    for (const Param& p : params_.all()) {
      params[p.name] = {{"shape", p.shape}, {"values", p.value}};
    }
    j["params"] = params;
    // Realized accessibility, for consumers that only need the matrix.
    ParamStore scratch = params_;
    Tape tape;
    StepContext ctx(tape, scratch);
    j["accessibility"] = accessibility(ctx).values;
    return j;
  }

  static KripkeModel from_json(const nlohmann::json& j) {
    AccessKind kind = j.at("kind").get<std::string>() == "dense"
                          ? AccessKind::Dense
                          : AccessKind::Embedding;
    KripkeModel m(j.at("worlds").get<std::vector<std::string>>(),
                  j.at("props").get<std::vector<std::string>>(), kind);
    m.valuation_ = j.at("valuation").get<std::vector<double>>();
    if (m.valuation_.size() != m.worlds_.size() * m.props_.size()) {
      throw std::invalid_argument("KripkeModel: valuation size mismatch");
    }
    for (auto& [name, pj] : j.at("params").items()) {
      Param& p = m.params_.at(name);
      auto shape = pj.at("shape").get<std::vector<std::size_t>>();
      auto values = pj.at("values").get<std::vector<double>>();
      if (shape != p.shape || values.size() != p.value.size()) {
        throw std::invalid_argument("KripkeModel: parameter shape mismatch: " +
                                    name);
      }
      p.value = values;
    }
    return m;
  }

 private:
  std::vector<std::string> worlds_;
  std::vector<std::string> props_;
  AccessKind kind_;
  std::vector<double> valuation_;  // row-major [W, P]
  ParamStore params_;
};

}  // namespace dml
