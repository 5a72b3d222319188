#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace scsnet {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {
struct Node;
}

/// Dense row-major array of doubles with an optional gradient slot.
///
/// A Tensor is a cheap handle: copies share the same underlying node, so a
/// parameter held by a layer and the handle passed to an optimizer refer to
/// the same storage. Every operation in ops.hpp records itself on a
/// define-by-run graph when any input requires a gradient and gradient
/// recording is enabled (see NoGradGuard). The graph is owned by the result
/// handles and is released when they go out of scope.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }

  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const;

  std::span<const double> data() const;
  /// Writable view of a leaf's values. Throws ContractError for results of
  /// recorded operations, whose values are owned by the graph.
  std::span<double> mutable_data();
  double item() const;

  bool requires_grad() const;
  bool is_leaf() const;
  bool has_grad() const;
  /// Accumulated gradient; empty span when none has been written yet.
  std::span<const double> grad() const;
  void zero_grad();

  /// Reverse sweep from this scalar. Leaf gradients accumulate across calls;
  /// interior gradients are recomputed from scratch each time.
  void backward() const;

  /// Same values, no history, no gradient requirement.
  Tensor detach() const;

 private:
  friend struct TensorAccess;
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

}  // namespace scsnet
