#pragma once

// Online trust learning from say-do contradictions.
//
// Five agents exchange promises; each observed (promise, outcome) pair is
// scored by how strongly a trusted promise is contradicted by the outcome.
// Trust is the sigmoid of a per-(receiver, sender) logit, and only a
// contradiction produces gradient: honest traffic leaves trust untouched,
// while a detected lie collapses the single affected entry in one observed
// event via an inner descent loop.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <dml/datasets.hpp>
#include <dml/fuzzy.hpp>
#include <dml/tensor.hpp>

namespace dml {

struct EpistemicConfig {
  double init_logit = 2.5;   // sigmoid(2.5) ~= 0.924: start from high trust
  double inner_lr = 1.0;     // plain gradient descent on the affected logit
  int max_inner_steps = 100; // per observed event
};

// Directed trust: entry (receiver, sender) is how much receiver trusts
// sender's messages. The diagonal exists but no self-message ever updates it.
struct TrustModel {
  static constexpr std::size_t kAgents = 5;
  std::vector<double> logits;

  explicit TrustModel(double init_logit = 2.5)
      : logits(kAgents * kAgents, init_logit) {}

  static std::size_t index(std::size_t receiver, std::size_t sender) {
    return receiver * kAgents + sender;
  }

  double logit(std::size_t receiver, std::size_t sender) const {
    return logits[index(receiver, sender)];
  }

  double trust(std::size_t receiver, std::size_t sender) const {
    return 1.0 / (1.0 + std::exp(-logit(receiver, sender)));
  }
};

// Builds the say-do contradiction for one message on the caller's graph:
// the promise holds to the degree the receiver trusts it AND it was made
// strongly; the loss is how far that combined claim exceeds what actually
// happened.
inline Tensor event_loss_graph(const Tensor& trust_logit, double intent,
                               double reality) {
  Tensor trust = sigmoid(trust_logit);
  Tensor claim = and_l(Tensor::scalar(intent), trust);
  return contradiction_loss(claim, Tensor::scalar(reality));
}

struct EventLoss {
  double loss = 0.0;
  double trust = 0.0;
};

inline EventLoss event_loss(const TrustModel& model, int sender, int receiver,
                            double intent, double reality) {
  if (sender == receiver)
    throw std::invalid_argument("event_loss: sender and receiver must differ");
  auto r = static_cast<std::size_t>(receiver);
  auto s = static_cast<std::size_t>(sender);
  Tensor loss = event_loss_graph(Tensor::scalar(model.logit(r, s)), intent,
                                 reality);
  return {loss.values[0], model.trust(r, s)};
}

struct TrustUpdate {
  int step = 0;
  int sender = 0;
  int receiver = 0;
  bool lie = false;
  double before = 0.0;
  double after = 0.0;
  int inner_steps = 0;
};

// Processes one observed interaction: while the event contradicts what the
// receiver believes, descend on that single trust logit. Zero loss means
// zero steps, so honest messages change nothing at all.
inline TrustUpdate observe(TrustModel& model, const Interaction& it,
                           const EpistemicConfig& cfg = {}) {
  if (it.sender == it.receiver)
    throw std::invalid_argument("observe: sender and receiver must differ");
  auto r = static_cast<std::size_t>(it.receiver);
  auto s = static_cast<std::size_t>(it.sender);
  const std::size_t idx = TrustModel::index(r, s);

  TrustUpdate rec;
  rec.step = it.step;
  rec.sender = it.sender;
  rec.receiver = it.receiver;
  rec.lie = it.lie;
  rec.before = model.trust(r, s);

  for (int k = 0; k < cfg.max_inner_steps; ++k) {
    Tape tape;
    Tensor logit =
        tape.variable(Tensor::scalar(model.logits[idx]), "trust_logit");
    Tensor loss = event_loss_graph(logit, it.intent, it.reality);
    if (loss.values[0] == 0.0) break;
    tape.backward(loss);
    model.logits[idx] -= cfg.inner_lr * tape.grad(logit)[0];
    ++rec.inner_steps;
  }

  rec.after = model.trust(r, s);
  return rec;
}

struct EpistemicResult {
  std::vector<std::string> agents;
  TrustModel model{};
  std::vector<TrustUpdate> updates;  // one record per observed interaction
};

inline EpistemicResult run_epistemic(const DiplomacyData& data,
                                     const EpistemicConfig& cfg = {}) {
  EpistemicResult result;
  result.agents = data.agents;
  result.model = TrustModel(cfg.init_logit);
  result.updates.reserve(data.interactions.size());
  for (const Interaction& it : data.interactions) {
    result.updates.push_back(observe(result.model, it, cfg));
  }
  return result;
}

}  // namespace dml
