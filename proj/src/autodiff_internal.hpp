#pragma once

// Graph internals shared by the operation implementations. Not installed.

#include <functional>
#include <memory>
#include <vector>

#include "scsnet/tensor.hpp"

namespace scsnet {
namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into the inputs' grads.
  std::function<void(Node&)> backward_fn;

  std::vector<double>& grad_buffer() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

struct TensorAccess {
  static const std::shared_ptr<detail::Node>& node(const Tensor& t) { return t.node_; }
  static Tensor wrap(std::shared_ptr<detail::Node> node) { return Tensor(std::move(node)); }
};

namespace detail {

inline Node& node_of(const Tensor& t) { return *TensorAccess::node(t); }

// Creates the result of an operation. History is kept only when recording is
// enabled and some input needs a gradient; the backward closure then receives
// the result node and must only touch inputs whose requires_grad is set.
Tensor make_result(Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
                   std::function<void(Node&)> backward_fn);

}  // namespace detail
}  // namespace scsnet
