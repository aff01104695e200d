#pragma once

// Self-contained verification suites, runnable from the CLI without any test
// framework. Five suites:
//
//   1. lukasiewicz-laws   - algebraic laws of the fuzzy connectives on an
//                           exhaustive 0.05-step grid.
//   2. autodiff-fd        - analytic gradients of every differentiable
//                           primitive against central finite differences at
//                           random points sampled away from kinks.
//   3. kripke-oracle      - tensor modal operators against a brute-force
//                           double-loop oracle on structures with <= 4 worlds.
//   4. crisp-duality      - necessity(A, v) == 1 - possibility(A, 1-v) for
//                           every crisp 3-world accessibility relation.
//   5. drone-layout       - geometric oracle for the orchestration fleet:
//                           distances, path clearances, and cost ordering.
//
// Mutations deliberately inject a fault so callers can verify the suites
// actually detect failures.

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <dml/datasets.hpp>
#include <dml/fuzzy.hpp>
#include <dml/kripke.hpp>
#include <dml/rng.hpp>
#include <dml/tensor.hpp>

namespace dml {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::size_t checks = 0;
  std::string detail;  // first failure description, empty when passed
};

enum class SelftestMutation {
  None,
  WrongReluGradient,   // corrupts the reported relu derivative
  Drone15OnDiagonal,   // moves drone 15 onto the through-zone diagonal
};

struct SelftestOptions {
  int fd_points = 100;
  SelftestMutation mutation = SelftestMutation::None;
  std::uint64_t seed = 42;
};

namespace selftest_detail {

class Recorder {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && detail_.empty()) detail_ = what;
  }
  bool passed() const { return detail_.empty(); }
  std::size_t checks() const { return checks_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t checks_ = 0;
  std::string detail_;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

inline double scalar_of(const Tensor& t) { return t.values.at(0); }

// --- Suite 1: fuzzy connective laws ---------------------------------------

inline SuiteResult fuzzy_laws() {
  Recorder r;
  auto val = [](double x) { return Tensor::scalar(x); };
  auto A = [&](double a, double b) { return scalar_of(and_l(val(a), val(b))); };
  auto O = [&](double a, double b) { return scalar_of(or_l(val(a), val(b))); };
  auto I = [&](double a, double b) {
    return scalar_of(implies_l(val(a), val(b)));
  };
  auto C = [&](double a, double b) {
    return scalar_of(contradiction_loss(val(a), val(b)));
  };
  const int steps = 20;  // grid 0, 0.05, ..., 1
  auto g = [&](int i) { return static_cast<double>(i) / steps; };
  const double tol = 1e-12;
  for (int i = 0; i <= steps; ++i) {
    double a = g(i);
    r.check(std::abs(A(a, 1.0) - a) <= tol, "and(a,1) != a at a=" + fmt(a));
    r.check(std::abs(A(a, 0.0)) <= tol, "and(a,0) != 0 at a=" + fmt(a));
    r.check(std::abs(O(a, 0.0) - a) <= tol, "or(a,0) != a at a=" + fmt(a));
    r.check(std::abs(I(0.0, a) - 1.0) <= tol, "0->b != 1 at b=" + fmt(a));
    r.check(std::abs(I(a, 1.0) - 1.0) <= tol, "a->1 != 1 at a=" + fmt(a));
    r.check(std::abs(scalar_of(not_l(val(a))) - (1.0 - a)) <= tol,
            "not(a) != 1-a at a=" + fmt(a));
    for (int j = 0; j <= steps; ++j) {
      double b = g(j);
      r.check(std::abs(A(a, b) - A(b, a)) <= tol,
              "and not commutative at " + fmt(a) + "," + fmt(b));
      r.check(std::abs(O(a, b) - O(b, a)) <= tol,
              "or not commutative at " + fmt(a) + "," + fmt(b));
      r.check(std::abs(C(a, b) - (1.0 - I(a, b))) <= tol,
              "contradiction != 1 - implication at " + fmt(a) + "," + fmt(b));
      for (int k = 0; k <= steps; ++k) {
        double c = g(k);
        bool lhs = A(a, b) <= c + 1e-9;
        bool rhs = a <= I(b, c) + 1e-9;
        r.check(lhs == rhs, "residuation fails at " + fmt(a) + "," + fmt(b) +
                                "," + fmt(c));
      }
    }
  }
  // Full associativity sweep over the triple grid.
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      for (int k = 0; k <= steps; ++k) {
        double a = g(i), b = g(j), c = g(k);
        r.check(std::abs(A(A(a, b), c) - A(a, A(b, c))) <= 1e-12,
                "and not associative at " + fmt(a) + "," + fmt(b) + "," +
                    fmt(c));
      }
    }
  }
  return {"lukasiewicz-laws", r.passed(), r.checks(), r.detail()};
}

// --- Suite 2: finite-difference gradient checks ----------------------------

using VecSampler = std::function<std::vector<double>(Rng&, std::size_t)>;
// Builds a scalar loss from the tracked input tensor.
using LossBuilder = std::function<Tensor(Tape&, const Tensor&)>;

struct FdCase {
  std::string name;
  std::vector<std::size_t> shape;  // shape of the tracked input
  LossBuilder build;
  VecSampler sample;
};

// Deterministic non-uniform weights turn any output into a scalar whose
// gradient exercises every output element differently.
inline Tensor weighted_sum(const Tensor& t) {
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = 0.3 + 0.11 * static_cast<double>((i * 7) % 13);
  }
  Tensor wt;
  wt.shape = t.shape;
  wt.values = w;
  return reduce_sum(mul(t, wt), std::nullopt);
}

inline VecSampler sample_uniform(double lo, double hi) {
  return [lo, hi](Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
  };
}

// Magnitudes at least `lo`, mixed signs: keeps clear of kinks at 0.
inline VecSampler sample_away_from_zero(double lo, double hi) {
  return [lo, hi](Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) {
      x = rng.uniform(lo, hi) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
    }
    return v;
  };
}

// Pairwise-distinct values: keeps min/max reductions away from ties.
inline VecSampler sample_distinct(double lo, double hi, double gap) {
  return [lo, hi, gap](Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        double x = rng.uniform(lo, hi);
        bool ok = true;
        for (std::size_t j = 0; j < i; ++j) {
          if (std::abs(v[j] - x) < gap) { ok = false; break; }
        }
        if (ok) { v[i] = x; break; }
      }
    }
    return v;
  };
}

// Values clear of the clamp boundary at `level`.
inline VecSampler sample_away_from_level(double level, double margin) {
  return [level, margin](Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) {
      x = rng.uniform(level - 2.0, level + 2.0);
      if (std::abs(x - level) < margin) {
        x = x < level ? level - margin : level + margin;
      }
    }
    return v;
  };
}

inline std::vector<FdCase> fd_cases() {
  std::vector<FdCase> cases;
  // The second operand of binary ops is a fixed untracked tensor; gradient
  // w.r.t. the tracked side is what the finite difference probes.
  auto fixed = [](std::size_t n, double base) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = base + 0.17 * static_cast<double>((i * 5) % 7);
    }
    return Tensor::vector(v);
  };

  cases.push_back({"add",
                   {6},
                   [=](Tape&, const Tensor& x) {
                     return weighted_sum(add(x, fixed(6, 0.4)));
                   },
                   sample_uniform(-2.0, 2.0)});
  cases.push_back({"sub",
                   {6},
                   [=](Tape&, const Tensor& x) {
                     return weighted_sum(sub(fixed(6, 0.4), x));
                   },
                   sample_uniform(-2.0, 2.0)});
  cases.push_back({"mul",
                   {6},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(mul(x, x));
                   },
                   sample_uniform(-2.0, 2.0)});
  cases.push_back({"divide",
                   {6},
                   [=](Tape&, const Tensor& x) {
                     return weighted_sum(divide(fixed(6, 1.4), x));
                   },
                   sample_away_from_zero(0.5, 2.0)});
  cases.push_back({"relu",
                   {8},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(relu(x));
                   },
                   sample_away_from_zero(0.1, 2.0)});
  cases.push_back({"sigmoid",
                   {8},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(sigmoid(x));
                   },
                   sample_uniform(-3.0, 3.0)});
  cases.push_back({"tanh",
                   {8},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(tanh_op(x));
                   },
                   sample_uniform(-3.0, 3.0)});
  cases.push_back({"log",
                   {8},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(log_op(x));
                   },
                   sample_uniform(0.5, 3.0)});
  cases.push_back({"exp",
                   {8},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(exp_op(x));
                   },
                   sample_uniform(-2.0, 2.0)});
  cases.push_back({"abs",
                   {8},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(abs_op(x));
                   },
                   sample_away_from_zero(0.1, 2.0)});
  cases.push_back({"clamp_max",
                   {8},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(clamp_max(x, 1.0));
                   },
                   sample_away_from_level(1.0, 0.1)});
  cases.push_back({"reduce_min",
                   {6},
                   [](Tape&, const Tensor& x) {
                     return reduce_min(x, std::nullopt);
                   },
                   sample_distinct(-1.0, 1.0, 0.05)});
  cases.push_back({"reduce_max",
                   {6},
                   [](Tape&, const Tensor& x) {
                     return reduce_max(x, std::nullopt);
                   },
                   sample_distinct(-1.0, 1.0, 0.05)});
  cases.push_back({"reduce_min_axis1",
                   {2, 3},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(reduce_min(x, 1));
                   },
                   sample_distinct(-1.0, 1.0, 0.05)});
  cases.push_back({"reduce_max_axis0",
                   {2, 3},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(reduce_max(x, 0));
                   },
                   sample_distinct(-1.0, 1.0, 0.05)});
  cases.push_back({"reduce_sum",
                   {6},
                   [](Tape&, const Tensor& x) {
                     return reduce_sum(x, std::nullopt);
                   },
                   sample_uniform(-2.0, 2.0)});
  cases.push_back({"reduce_mean_axis0",
                   {2, 3},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(reduce_mean(x, 0));
                   },
                   sample_uniform(-2.0, 2.0)});
  cases.push_back({"matmul",
                   {2, 3},
                   [](Tape&, const Tensor& x) {
                     Tensor k = Tensor::matrix(
                         3, 2, {0.3, -0.7, 1.1, 0.4, -0.2, 0.9});
                     return weighted_sum(matmul(x, k));
                   },
                   sample_uniform(-1.5, 1.5)});
  cases.push_back({"matmul_vec",
                   {2, 3},
                   [](Tape&, const Tensor& x) {
                     Tensor k = Tensor::vector({0.5, -0.6, 0.8});
                     return weighted_sum(matmul(x, k));
                   },
                   sample_uniform(-1.5, 1.5)});
  cases.push_back({"softmax",
                   {5},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(softmax(x));
                   },
                   sample_uniform(-2.0, 2.0)});
  cases.push_back({"reshape",
                   {6},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(reshape(x, {2, 3}));
                   },
                   sample_uniform(-2.0, 2.0)});
  cases.push_back({"pair_concat",
                   {3, 2},
                   [](Tape&, const Tensor& x) {
                     return weighted_sum(pair_concat(x));
                   },
                   sample_uniform(-2.0, 2.0)});
  return cases;
}

inline SuiteResult autodiff_fd(const SelftestOptions& opt) {
  Recorder r;
  Rng rng(opt.seed, "selftest-fd");
  const double h = 1e-5;
  for (const FdCase& c : fd_cases()) {
    std::size_t size = 1;
    for (std::size_t d : c.shape) size *= d;
    auto make_input = [&](Tape& tape, const std::vector<double>& values) {
      Tensor init;
      init.shape = c.shape;
      init.values = values;
      return tape.variable(init, "x");
    };
    for (int pt = 0; pt < opt.fd_points; ++pt) {
      std::vector<double> x = c.sample(rng, size);
      Tape tape;
      Tensor input = make_input(tape, x);
      Tensor loss = c.build(tape, input);
      tape.backward(loss);
      std::vector<double> grad = tape.grad(input);
      if (c.name == "relu" &&
          opt.mutation == SelftestMutation::WrongReluGradient) {
        grad[0] += 0.05;  // injected fault: derivative off by a constant
      }
      for (std::size_t i = 0; i < size; ++i) {
        std::vector<double> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        Tape tp, tm;
        double fp = c.build(tp, make_input(tp, xp)).values.at(0);
        double fm = c.build(tm, make_input(tm, xm)).values.at(0);
        double fd = (fp - fm) / (2.0 * h);
        bool ok = std::abs(grad[i] - fd) <= 1e-4 * std::abs(fd) + 1e-6;
        r.check(ok, c.name + ": grad[" + std::to_string(i) + "] analytic " +
                        fmt(grad[i]) + " vs fd " + fmt(fd));
      }
      if (!r.passed()) break;
    }
    if (!r.passed()) break;
  }
  return {"autodiff-fd", r.passed(), r.checks(), r.detail()};
}

// --- Suite 3: brute-force modal oracle -------------------------------------

inline SuiteResult kripke_oracle(const SelftestOptions& opt) {
  Recorder r;
  Rng rng(opt.seed, "selftest-kripke");
  for (std::size_t w = 2; w <= 4; ++w) {
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<double> a(w * w), v(w);
      for (double& x : a) x = rng.uniform();
      for (double& x : v) x = rng.uniform();
      Tensor A = Tensor::matrix(w, w, a);
      Tensor V = Tensor::vector(v);
      Tensor nec = necessity(A, V);
      Tensor pos = possibility(A, V);
      for (std::size_t i = 0; i < w; ++i) {
        double nmin = 1.0, pmax = 0.0;
        for (std::size_t j = 0; j < w; ++j) {
          nmin = std::min(nmin, std::min(1.0, (1.0 - a[i * w + j]) + v[j]));
          pmax = std::max(pmax, a[i * w + j] * v[j]);
        }
        r.check(std::abs(nec.values[i] - nmin) <= 1e-12,
                "necessity mismatch at W=" + std::to_string(w));
        r.check(std::abs(pos.values[i] - pmax) <= 1e-12,
                "possibility mismatch at W=" + std::to_string(w));
      }
      // axiom_loss against a hand loop
      double lambda = rng.uniform(0.5, 3.0);
      std::vector<double> ante(w), cons(w);
      for (double& x : ante) x = rng.uniform();
      for (double& x : cons) x = rng.uniform();
      double expect = 0.0;
      for (std::size_t i = 0; i < w; ++i) {
        expect += std::max(0.0, ante[i] - cons[i]);
      }
      expect = lambda * expect / static_cast<double>(w);
      double got = scalar_of(
          axiom_loss(Tensor::vector(ante), Tensor::vector(cons), lambda));
      r.check(std::abs(got - expect) <= 1e-12, "axiom_loss mismatch");
      if (!r.passed()) break;
    }
    if (!r.passed()) break;
  }
  return {"kripke-oracle", r.passed(), r.checks(), r.detail()};
}

// --- Suite 4: crisp duality -------------------------------------------------

inline SuiteResult crisp_duality() {
  Recorder r;
  const std::size_t w = 3;
  const std::array<double, 5> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int mask = 0; mask < (1 << 9); ++mask) {
    std::vector<double> a(9);
    for (int bit = 0; bit < 9; ++bit) a[static_cast<std::size_t>(bit)] = (mask >> bit) & 1 ? 1.0 : 0.0;
    Tensor A = Tensor::matrix(w, w, a);
    for (double v0 : grid) {
      for (double v1 : grid) {
        for (double v2 : grid) {
          Tensor v = Tensor::vector({v0, v1, v2});
          Tensor nv = Tensor::vector({1.0 - v0, 1.0 - v1, 1.0 - v2});
          Tensor boxv = necessity(A, v);
          Tensor diam = possibility(A, nv);
          for (std::size_t i = 0; i < w; ++i) {
            r.check(boxv.values[i] == 1.0 - diam.values[i],
                    "duality fails at mask " + std::to_string(mask));
          }
          if (!r.passed()) return {"crisp-duality", false, r.checks(), r.detail()};
        }
      }
    }
  }
  return {"crisp-duality", r.passed(), r.checks(), r.detail()};
}

// --- Suite 5: drone layout geometric oracle ---------------------------------

inline SuiteResult drone_layout_oracle(const SelftestOptions& opt) {
  Recorder r;
  DroneLayout l = make_drone_layout();
  if (opt.mutation == SelftestMutation::Drone15OnDiagonal) {
    l.position[15] = {-1.2, -1.2};  // injected fault: path crosses the zone
  }
  const double tol = 1e-9;
  auto d = [&](std::size_t i) { return dist(l.position[i], l.target); };

  r.check(std::abs(d(0) - 6.0 * std::sqrt(2.0)) <= tol, "drone 0 distance");
  r.check(std::abs(d(1) - std::sqrt(0.08)) <= tol, "drone 1 distance");
  r.check(std::abs(d(2) - std::sqrt(0.74)) <= tol, "drone 2 distance");
  for (std::size_t k = 3; k <= 14; ++k) {
    r.check(std::abs(d(k) - 10.5) <= tol,
            "ring drone " + std::to_string(k) + " distance");
  }
  r.check(std::abs(d(15) - 9.2) <= tol, "drone 15 distance");

  // Fine-grained clearance: which straight paths intersect the no-fly zone?
  std::vector<std::size_t> violators;
  for (std::size_t i = 0; i < DroneLayout::kCount; ++i) {
    if (l.path_clearance(i, 1000) < l.nofly_radius) violators.push_back(i);
  }
  r.check(violators.size() == 1 && violators[0] == 0,
          "exactly drone 0 should cross the no-fly zone (got " +
              std::to_string(violators.size()) + " violators)");
  r.check(l.path_clearance(0, 1000) < 0.01, "drone 0 path passes the center");
  r.check(std::abs(l.path_clearance(15, 1000) - 3.0) <= 1e-3,
          "drone 15 clearance should be 3");
  for (std::size_t k = 3; k <= 14; ++k) {
    r.check(l.path_clearance(k, 1000) >= 1.7,
            "ring drone " + std::to_string(k) + " clearance margin");
  }
  // The coarse 10-sample grid used by the differentiable loss sees drone 0's
  // diagonal at sqrt(2)/3 from the center.
  r.check(std::abs(l.path_clearance(0, 10) - std::sqrt(2.0) / 3.0) <= tol,
          "drone 0 coarse clearance");

  // Cost ordering under the deontic/epistemic/conflict penalties.
  const double lambda = 15.0;
  auto cost = [&](std::size_t i) {
    double viol = std::max(0.0, l.nofly_radius - l.path_clearance(i, 10));
    return d(i) + lambda * (viol + (1.0 - l.trust[i]) + l.conflict[i]);
  };
  double ring_min = 1e30, ring_max = -1e30;
  for (std::size_t k = 3; k <= 14; ++k) {
    ring_min = std::min(ring_min, cost(k));
    ring_max = std::max(ring_max, cost(k));
  }
  r.check(cost(15) < ring_min - 1.0, "drone 15 should be cheapest");
  r.check(ring_max < cost(1), "ring should beat the untrusted drone");
  r.check(cost(1) < cost(2), "untrusted beats conflicted");
  r.check(cost(2) < cost(0), "conflicted beats zone-crossing");
  return {"drone-layout", r.passed(), r.checks(), r.detail()};
}

}  // namespace selftest_detail

inline std::vector<SuiteResult> run_selftest(const SelftestOptions& opt = {}) {
  std::vector<SuiteResult> results;
  results.push_back(selftest_detail::fuzzy_laws());
  results.push_back(selftest_detail::autodiff_fd(opt));
  results.push_back(selftest_detail::kripke_oracle(opt));
  results.push_back(selftest_detail::crisp_duality());
  results.push_back(selftest_detail::drone_layout_oracle(opt));
  return results;
}

}  // namespace dml
