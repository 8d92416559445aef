#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "gtppo/netcore/parameter_store.hpp"
#include "gtppo/netcore/tensor.hpp"

namespace gtppo::netcore {

// Handle to a value recorded on a tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode recorder. Every differentiable op appends a node holding its
// output and a closure that pushes the output gradient to its inputs; backward
// replays the closures in reverse insertion order.
//
// A tape constructed with record=false keeps values only (inference path);
// the same op code runs in both modes so the arithmetic is identical.
template <typename T>
class BasicTape {
 public:
  using TensorT = BasicTensor<T>;
  using Backward = std::function<void(BasicTape&, Var out)>;

  explicit BasicTape(bool record = true) : record_(record) {}

  bool recording() const { return record_; }

  Var constant(TensorT value) { return push(std::move(value), nullptr, nullptr, false); }

  // Leaf that receives a gradient (used by gradient checks and tests).
  Var input(TensorT value) { return push(std::move(value), nullptr, nullptr, record_); }

  // Leaf bound to a stored parameter. The value is referenced, not copied, and
  // its gradient accumulates straight into the store's accumulator.
  Var parameter(BasicParameterStore<T>& store, const std::string& name) {
    auto& value = store.value(name);
    return push(TensorT{}, &value, record_ ? &store.grad(name) : nullptr, record_);
  }
  Var parameter(const BasicParameterStore<T>& store, const std::string& name) {
    return push(TensorT{}, &store.value(name), nullptr, false);
  }

  // Records an op output. `backward` runs only if any input needs a gradient.
  Var record(TensorT value, std::initializer_list<Var> inputs, Backward backward) {
    bool needs = false;
    if (record_) {
      for (Var v : inputs) needs = needs || nodes_[v.id].requires_grad;
    }
    Var out = push(std::move(value), nullptr, nullptr, needs);
    if (needs) nodes_[out.id].backward = std::move(backward);
    return out;
  }

  const TensorT& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.external ? *n.external : n.owned;
  }

  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  // Gradient buffer of `v`, allocated as zeros on first access.
  TensorT& grad(Var v) {
    Node& n = nodes_[v.id];
    if (n.grad_sink) return *n.grad_sink;
    if (n.grad.size() != value(v).size()) n.grad = TensorT(value(v).shape());
    return n.grad;
  }

  bool has_grad(Var v) const {
    const Node& n = nodes_[v.id];
    return n.grad_sink != nullptr || n.grad.size() == value(v).size();
  }

  // Seeds d(output)/d(output) = 1 for a single-element output and replays.
  void backward(Var output) {
    if (!record_) throw ConfigError("backward on a non-recording tape");
    if (value(output).size() != 1) throw ConfigError("backward requires a scalar output");
    grad(output)[0] = T(1);
    for (int i = output.id; i >= 0; --i) {
      Node& n = nodes_[i];
      if (n.backward && has_grad(Var{i})) n.backward(*this, Var{i});
    }
  }

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    TensorT owned;
    const TensorT* external = nullptr;
    TensorT* grad_sink = nullptr;
    TensorT grad;
    Backward backward;
    bool requires_grad = false;
  };

  Var push(TensorT value, const TensorT* external, TensorT* sink, bool requires_grad) {
    Node n;
    n.owned = std::move(value);
    n.external = external;
    n.grad_sink = sink;
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  bool record_;
  std::deque<Node> nodes_;  // element references must survive push_back
};

using Tape = BasicTape<float>;

}  // namespace gtppo::netcore
