#pragma once

#include <map>
#include <string>
#include <vector>

#include "gtppo/netcore/tensor.hpp"

namespace gtppo::netcore {

// Named parameters with one gradient accumulator each. Iteration order is the
// lexicographic name order, which is also the checkpoint order.
template <typename T>
class BasicParameterStore {
 public:
  struct Entry {
    BasicTensor<T> value;
    BasicTensor<T> grad;
  };

  BasicTensor<T>& add(const std::string& name, BasicTensor<T> value) {
    if (entries_.count(name) != 0) throw ConfigError("duplicate parameter '" + name + "'");
    BasicTensor<T> grad(value.shape());
    auto [it, _] = entries_.emplace(name, Entry{std::move(value), std::move(grad)});
    return it->second.value;
  }

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }

  BasicTensor<T>& value(const std::string& name) { return lookup(name).value; }
  const BasicTensor<T>& value(const std::string& name) const { return lookup(name).value; }
  BasicTensor<T>& grad(const std::string& name) { return lookup(name).grad; }
  const BasicTensor<T>& grad(const std::string& name) const { return lookup(name).grad; }

  void zero_grad() {
    for (auto& [_, e] : entries_) e.grad.fill(T(0));
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [n, _] : entries_) out.push_back(n);
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [_, e] : entries_) n += e.value.size();
    return n;
  }

  std::map<std::string, Entry>& entries() { return entries_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  // Global L2 norm over every gradient accumulator, in double.
  double grad_norm() const {
    double s = 0.0;
    for (const auto& [_, e] : entries_) {
      for (T g : e.grad.values()) s += static_cast<double>(g) * static_cast<double>(g);
    }
    return std::sqrt(s);
  }

  void scale_grads(T factor) {
    for (auto& [_, e] : entries_) {
      for (T& g : e.grad.values()) g *= factor;
    }
  }

  template <typename U>
  BasicParameterStore<U> cast() const {
    BasicParameterStore<U> out;
    for (const auto& [n, e] : entries_) out.add(n, e.value.template cast<U>());
    return out;
  }

 private:
  Entry& lookup(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second;
  }
  const Entry& lookup(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second;
  }

  std::map<std::string, Entry> entries_;
};

using ParameterStore = BasicParameterStore<float>;

}  // namespace gtppo::netcore
