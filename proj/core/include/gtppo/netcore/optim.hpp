#pragma once

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "gtppo/netcore/parameter_store.hpp"

namespace gtppo::netcore {

// Adam with bias correction over every entry of a parameter store.
class Adam {
 public:
  struct Options {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  Adam() = default;
  explicit Adam(Options opt) : opt_(opt) {}

  void step(ParameterStore& store, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
    for (auto& [name, e] : store.entries()) {
      auto& st = state_[name];
      if (st.m.size() != e.value.size()) {
        st.m.assign(e.value.size(), 0.0f);
        st.v.assign(e.value.size(), 0.0f);
      }
      for (std::size_t i = 0; i < e.value.size(); ++i) {
        const double g = e.grad[i];
        st.m[i] = static_cast<float>(opt_.beta1 * st.m[i] + (1.0 - opt_.beta1) * g);
        st.v[i] = static_cast<float>(opt_.beta2 * st.v[i] + (1.0 - opt_.beta2) * g * g);
        const double mh = st.m[i] / c1;
        const double vh = st.v[i] / c2;
        e.value[i] = static_cast<float>(e.value[i] - lr * mh / (std::sqrt(vh) + opt_.eps));
      }
    }
  }

  long steps() const { return t_; }

 private:
  struct Moments {
    std::vector<float> m, v;
  };
  Options opt_;
  long t_ = 0;
  std::map<std::string, Moments> state_;
};

// Xavier/Glorot uniform fill for a [fan_in, fan_out] matrix.
template <typename T, typename Rng>
void xavier_uniform(BasicTensor<T>& w, Rng& rng, double gain = 1.0) {
  const double fan_in = w.rows(), fan_out = w.cols();
  const double a = gain * std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-a, a);
  for (auto& v : w.values()) v = static_cast<T>(dist(rng));
}

}  // namespace gtppo::netcore
