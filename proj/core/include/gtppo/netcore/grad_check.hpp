#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gtppo/netcore/tape.hpp"

namespace gtppo::netcore {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_location;
  std::size_t checked = 0;
};

namespace detail {

// Elementwise relative error with an absolute floor on the denominator so
// that gradients that are zero on both sides compare as equal.
inline double rel_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), floor});
  return std::fabs(analytic - numeric) / denom;
}

inline void note(GradCheckResult& r, double err, const std::string& where) {
  ++r.checked;
  if (r.worst_location.empty() || err > r.max_rel_error) {
    r.max_rel_error = err;
    r.worst_location = where;
  }
}

}  // namespace detail

// Compares reverse-mode gradients of a scalar-valued function against central
// finite differences. `fn` receives a tape and one leaf per input and returns
// a single-element Var. Runs in double precision.
using GradFn = std::function<Var(BasicTape<double>&, const std::vector<Var>&)>;

inline GradCheckResult grad_check(const GradFn& fn, std::vector<BasicTensor<double>> inputs, double eps = 1e-5,
                                  double floor = 1e-5) {
  if (eps < 1e-5 || eps > 1e-3) throw ConfigError("grad_check: eps must lie in [1e-5, 1e-3]");
  auto evaluate = [&](bool record, std::vector<BasicTensor<double>>& in, std::vector<BasicTensor<double>>* grads) {
    BasicTape<double> tape(record);
    std::vector<Var> leaves;
    for (auto& t : in) leaves.push_back(record ? tape.input(t) : tape.constant(t));
    Var out = fn(tape, leaves);
    const double value = tape.value(out)[0];
    if (!std::isfinite(value)) throw DivergenceError("grad_check: non-finite function value");
    if (grads != nullptr) {
      tape.backward(out);
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        grads->push_back(tape.has_grad(leaves[i]) ? tape.grad(leaves[i]) : BasicTensor<double>(in[i].shape()));
      }
    }
    return value;
  };

  std::vector<BasicTensor<double>> analytic;
  evaluate(true, inputs, &analytic);

  GradCheckResult result;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = 0; j < inputs[i].size(); ++j) {
      const double saved = inputs[i][j];
      inputs[i][j] = saved + eps;
      const double fp = evaluate(false, inputs, nullptr);
      inputs[i][j] = saved - eps;
      const double fm = evaluate(false, inputs, nullptr);
      inputs[i][j] = saved;
      const double numeric = (fp - fm) / (2.0 * eps);
      const double a = analytic[i][j];
      if (!std::isfinite(a) || !std::isfinite(numeric)) {
        throw DivergenceError("grad_check: non-finite gradient at input " + std::to_string(i) + " element " +
                              std::to_string(j));
      }
      detail::note(result, detail::rel_error(a, numeric, floor),
                   "input " + std::to_string(i) + " element " + std::to_string(j));
    }
  }
  return result;
}

// Same check against every entry of a parameter store. `fn` builds the
// function with `tape.parameter(store, name)` leaves.
using StoreGradFn = std::function<Var(BasicTape<double>&, BasicParameterStore<double>&)>;

inline GradCheckResult grad_check_store(const StoreGradFn& fn, BasicParameterStore<double>& store, double eps = 1e-5,
                                        double floor = 1e-5) {
  if (eps < 1e-5 || eps > 1e-3) throw ConfigError("grad_check: eps must lie in [1e-5, 1e-3]");
  auto value_of = [&]() {
    BasicTape<double> tape(false);
    const double v = tape.value(fn(tape, store))[0];
    if (!std::isfinite(v)) throw DivergenceError("grad_check: non-finite function value");
    return v;
  };
  store.zero_grad();
  {
    BasicTape<double> tape(true);
    Var out = fn(tape, store);
    tape.backward(out);
  }
  GradCheckResult result;
  for (auto& [name, entry] : store.entries()) {
    for (std::size_t j = 0; j < entry.value.size(); ++j) {
      const double saved = entry.value[j];
      entry.value[j] = saved + eps;
      const double fp = value_of();
      entry.value[j] = saved - eps;
      const double fm = value_of();
      entry.value[j] = saved;
      const double numeric = (fp - fm) / (2.0 * eps);
      const double a = entry.grad[j];
      if (!std::isfinite(a) || !std::isfinite(numeric)) {
        throw DivergenceError("grad_check: non-finite gradient at " + name + "[" + std::to_string(j) + "]");
      }
      detail::note(result, detail::rel_error(a, numeric, floor), name + "[" + std::to_string(j) + "]");
    }
  }
  return result;
}

}  // namespace gtppo::netcore
