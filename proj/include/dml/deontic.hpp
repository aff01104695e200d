#pragma once

// Legality-boundary learning for order-book spoofing (large orders cancelled
// almost immediately). A 2-64-64-1 dense network with relu hidden layers and
// a tanh output scores each trade in [-1, 1]; negative means prohibited.
// Sanctioned examples are rare (about 1.4% of trades), so the hinge loss
// weights them 50x - without that, permitting everything looks excellent.
//
// Training runs a hand-fused forward/backward pass over the full batch for
// speed; the unit tests check its gradients against an equivalent graph built
// on the general-purpose tape.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <dml/datasets.hpp>
#include <dml/metrics.hpp>
#include <dml/optim.hpp>
#include <dml/rng.hpp>
#include <dml/tensor.hpp>

namespace dml {

inline constexpr int kDeonticHidden = 64;

struct HingeConfig {
  double weight_normal = 1.0;
  double weight_sanction = 50.0;
  double margin = 1.0;
};

struct DeonticConfig {
  std::size_t epochs = 1000;
  double lr = 0.003;
  HingeConfig hinge;
  std::uint64_t seed = 42;
};

// 2 -> 64 -> 64 -> 1 network. Weight matrices are stored row-major [in, out]
// so the plain forward pass, the fused trainer, and a tape-built matmul graph
// all read the same storage. Initialization is uniform in +-1/sqrt(fan_in).
struct DeonticNet {
  ParamStore params;

  explicit DeonticNet(std::uint64_t seed = 42) {
    Rng rng(seed, "legality-net-init");
    auto draw = [&](const std::vector<std::size_t>& shape,
                    std::size_t fan_in) {
      Tensor t = Tensor::zeros(shape);
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (double& v : t.values) v = rng.uniform(-bound, bound);
      return t;
    };
    const std::size_t h = kDeonticHidden;
    params.add("W1", draw({2, h}, 2));
    params.add("b1", draw({h}, 2));
    params.add("W2", draw({h, h}, h));
    params.add("b2", draw({h}, h));
    params.add("W3", draw({h, 1}, h));
    params.add("b3", draw({1}, h));
  }
};

namespace deontic_detail {

// Raw pointers into the parameter store, hoisted out of the per-row loops.
struct NetView {
  const double *W1, *b1, *W2, *b2, *W3, *b3;
  explicit NetView(const DeonticNet& net)
      : W1(net.params.at("W1").value.data()),
        b1(net.params.at("b1").value.data()),
        W2(net.params.at("W2").value.data()),
        b2(net.params.at("b2").value.data()),
        W3(net.params.at("W3").value.data()),
        b3(net.params.at("b3").value.data()) {}
};

// Forward pass for one trade; fills the post-relu hidden activations (each
// kDeonticHidden wide) and returns the tanh legality score.
inline double forward_row(const NetView& v, double x0, double x1, double* h1,
                          double* h2) {
  constexpr int H = kDeonticHidden;
  for (int j = 0; j < H; ++j) {
    const double z = x0 * v.W1[j] + x1 * v.W1[H + j] + v.b1[j];
    h1[j] = z > 0 ? z : 0;
  }
  for (int j = 0; j < H; ++j) h2[j] = v.b2[j];
  for (int k = 0; k < H; ++k) {
    const double a = h1[k];
    if (a == 0) continue;
    const double* w = &v.W2[k * H];
    for (int j = 0; j < H; ++j) h2[j] += a * w[j];
  }
  double z3 = v.b3[0];
  for (int j = 0; j < H; ++j) {
    h2[j] = h2[j] > 0 ? h2[j] : 0;
    z3 += h2[j] * v.W3[j];
  }
  return std::tanh(z3);
}

inline double hinge_weight(int label, const HingeConfig& cfg) {
  if (label == 1) return cfg.weight_normal;
  if (label == -1) return cfg.weight_sanction;
  throw std::invalid_argument("hinge loss: labels must be +1 or -1");
}

inline void validate(const std::vector<Trade>& batch, const HingeConfig& cfg) {
  if (batch.empty())
    throw std::invalid_argument("hinge loss: batch is empty");
  if (cfg.weight_normal <= 0 || cfg.weight_sanction <= 0)
    throw std::invalid_argument("hinge loss: weights must be positive");
}

}  // namespace deontic_detail

inline double legality(const DeonticNet& net, double duration, double size) {
  deontic_detail::NetView v(net);
  double h1[kDeonticHidden], h2[kDeonticHidden];
  return deontic_detail::forward_row(v, duration, size, h1, h2);
}

// Mean over the batch of w_i * max(0, margin - y_i * score_i).
inline double hinge_loss(const DeonticNet& net, const std::vector<Trade>& batch,
                         const HingeConfig& cfg = {}) {
  deontic_detail::validate(batch, cfg);
  deontic_detail::NetView v(net);
  double h1[kDeonticHidden], h2[kDeonticHidden];
  double total = 0.0;
  for (const Trade& t : batch) {
    const double w = deontic_detail::hinge_weight(t.label, cfg);
    const double a = deontic_detail::forward_row(v, t.duration, t.size, h1, h2);
    const double m = cfg.margin - t.label * a;
    if (m > 0 || std::isnan(m)) total += w * m;  // NaN scores must surface
  }
  return total / static_cast<double>(batch.size());
}

// One full-batch pass: loss, spoof recall at the current parameters (a trade
// is flagged when its score is negative), and the exact gradient of
// hinge_loss for every parameter, ready to feed an optimizer.
struct HingeBatch {
  double loss = 0.0;
  double recall = 0.0;
  std::vector<GradEntry> grads;
};

inline HingeBatch hinge_gradients(DeonticNet& net,
                                  const std::vector<Trade>& batch,
                                  const HingeConfig& cfg = {}) {
  deontic_detail::validate(batch, cfg);
  constexpr int H = kDeonticHidden;
  const std::size_t n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  deontic_detail::NetView v(net);

  std::vector<double> h1(n * H), h2(n * H), score(n);
  HingeBatch out;
  std::size_t tp = 0, fn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Trade& t = batch[i];
    const double w = deontic_detail::hinge_weight(t.label, cfg);
    score[i] =
        deontic_detail::forward_row(v, t.duration, t.size, &h1[i * H],
                                    &h2[i * H]);
    const double m = cfg.margin - t.label * score[i];
    if (m > 0 || std::isnan(m)) out.loss += w * m;  // NaN scores must surface
    if (t.spoof) (score[i] < 0 ? tp : fn) += 1;
  }
  out.loss *= inv_n;
  out.recall = (tp + fn) == 0 ? 0.0
                              : static_cast<double>(tp) /
                                    static_cast<double>(tp + fn);

  std::vector<double> dW1(2 * H, 0.0), db1(H, 0.0), dW2(H * H, 0.0),
      db2(H, 0.0), dW3(H, 0.0), db3(1, 0.0);
  double g1[H], g2[H];
  for (std::size_t i = 0; i < n; ++i) {
    const Trade& t = batch[i];
    const double y = static_cast<double>(t.label);
    const double a = score[i];
    if (cfg.margin - y * a <= 0) continue;  // zero subgradient at the hinge
    const double w = deontic_detail::hinge_weight(t.label, cfg);
    const double up = -w * y * inv_n * (1.0 - a * a);
    const double* r1 = &h1[i * H];
    const double* r2 = &h2[i * H];
    db3[0] += up;
    for (int j = 0; j < H; ++j) {
      dW3[j] += up * r2[j];
      g2[j] = r2[j] > 0 ? up * v.W3[j] : 0.0;
    }
    for (int j = 0; j < H; ++j) db2[j] += g2[j];
    for (int k = 0; k < H; ++k) {
      const double act = r1[k];
      double acc = 0.0;
      double* dw = &dW2[k * H];
      const double* w2 = &v.W2[k * H];
      for (int j = 0; j < H; ++j) {
        dw[j] += act * g2[j];
        acc += w2[j] * g2[j];
      }
      g1[k] = act > 0 ? acc : 0.0;
    }
    for (int j = 0; j < H; ++j) {
      dW1[j] += t.duration * g1[j];
      dW1[H + j] += t.size * g1[j];
      db1[j] += g1[j];
    }
  }

  auto entry = [&net](const char* name, std::vector<double>&& grad) {
    return GradEntry{name, &net.params.at(name).value, std::move(grad)};
  };
  out.grads.push_back(entry("W1", std::move(dW1)));
  out.grads.push_back(entry("b1", std::move(db1)));
  out.grads.push_back(entry("W2", std::move(dW2)));
  out.grads.push_back(entry("b2", std::move(db2)));
  out.grads.push_back(entry("W3", std::move(dW3)));
  out.grads.push_back(entry("b3", std::move(db3)));
  return out;
}

struct EpochStat {
  std::size_t epoch = 0;
  double loss = 0.0;
  double recall = 0.0;
};

struct DeonticResult {
  DeonticNet net;
  std::vector<EpochStat> log;  // epochs + 1 entries; last is post-training
};

inline DeonticResult train_deontic(DeonticNet net,
                                   const std::vector<Trade>& trades,
                                   const DeonticConfig& cfg) {
  DeonticResult result{std::move(net), {}};
  Adam opt(cfg.lr);
  for (std::size_t epoch = 0; epoch <= cfg.epochs; ++epoch) {
    HingeBatch step = hinge_gradients(result.net, trades, cfg.hinge);
    if (!std::isfinite(step.loss))
      throw std::runtime_error("train_deontic: loss diverged");
    result.log.push_back({epoch, step.loss, step.recall});
    if (epoch == cfg.epochs) break;
    opt.step(step.grads);
  }
  return result;
}

inline DeonticResult train_deontic(const std::vector<Trade>& trades,
                                   const DeonticConfig& cfg = {}) {
  return train_deontic(DeonticNet(cfg.seed), trades, cfg);
}

// Precision/recall/F1 of "score < 0 means spoof" against the true spoof
// flags (not the noisy sanction labels used in training).
inline BinaryMetrics evaluate_deontic(const DeonticNet& net,
                                      const std::vector<Trade>& trades) {
  std::vector<double> flagged(trades.size());
  std::vector<int> truth(trades.size());
  for (std::size_t i = 0; i < trades.size(); ++i) {
    flagged[i] = legality(net, trades[i].duration, trades[i].size) < 0 ? 1.0
                                                                       : 0.0;
    truth[i] = trades[i].spoof ? 1 : 0;
  }
  return binary_metrics(flagged, truth, 0.5);
}

enum class TradeAxis { Duration, Size };

struct BoundaryProbe {
  double input = 0.0;  // the swept coordinate
  double score = 0.0;
  bool permitted = true;  // score >= 0; exactly zero counts as permitted
};

// Fix one input dimension and sweep the other over `grid`.
inline std::vector<BoundaryProbe> probe_boundary(
    const DeonticNet& net, TradeAxis fixed_axis, double fixed_value,
    const std::vector<double>& grid) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(fixed_value))
    throw std::invalid_argument("probe_boundary: fixed value outside [0,1]");
  std::vector<BoundaryProbe> rows;
  rows.reserve(grid.size());
  for (double g : grid) {
    if (!in_unit(g))
      throw std::invalid_argument("probe_boundary: grid value outside [0,1]");
    const double duration = fixed_axis == TradeAxis::Duration ? fixed_value : g;
    const double size = fixed_axis == TradeAxis::Duration ? g : fixed_value;
    const double s = legality(net, duration, size);
    rows.push_back({g, s, s >= 0.0});
  }
  return rows;
}

// Retrains with and without the 50x sanction weight on several seeds to show
// the weight is what buys perfect recall under class imbalance.
struct WeightStudyRun {
  std::uint64_t seed = 0;
  BinaryMetrics weighted;  // weight_sanction = 50
  BinaryMetrics flat;      // weight_sanction = 1
  bool degraded = false;   // flat run lost recall or dropped F1 by > 0.05
};

struct WeightStudy {
  std::vector<WeightStudyRun> runs;
  std::size_t degraded_count = 0;
};

inline WeightStudy class_weight_study(std::size_t seeds = 5,
                                      std::uint64_t first_seed = 42,
                                      std::size_t epochs = 60) {
  WeightStudy study;
  for (std::uint64_t seed = first_seed; seed < first_seed + seeds; ++seed) {
    const std::vector<Trade> trades = make_trades(seed);
    DeonticConfig weighted_cfg;
    weighted_cfg.seed = seed;
    weighted_cfg.epochs = epochs;
    DeonticConfig flat_cfg = weighted_cfg;
    flat_cfg.hinge.weight_sanction = 1.0;

    WeightStudyRun run;
    run.seed = seed;
    run.weighted = evaluate_deontic(train_deontic(trades, weighted_cfg).net,
                                    trades);
    run.flat = evaluate_deontic(train_deontic(trades, flat_cfg).net, trades);
    run.degraded =
        run.flat.recall < 1.0 || run.flat.f1 < run.weighted.f1 - 0.05;
    study.degraded_count += run.degraded ? 1 : 0;
    study.runs.push_back(run);
  }
  return study;
}

}  // namespace dml
