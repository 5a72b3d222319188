#include "scsnet/ops.hpp"

#include <cmath>
#include <limits>

#include "autodiff_internal.hpp"
#include "scsnet/error.hpp"

namespace scsnet {

namespace {

constexpr const char* kModule = "tensor-autodiff";

using detail::Node;

enum class Broadcast { kNone, kScalarA, kScalarB };

Broadcast classify(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::kNone;
  // Both single-element: keep the higher-rank shape.
  if (a.numel() == 1 && b.numel() == 1) return a.rank() >= b.rank() ? Broadcast::kScalarB : Broadcast::kScalarA;
  if (a.numel() == 1) return Broadcast::kScalarA;
  if (b.numel() == 1) return Broadcast::kScalarB;
  throw DimensionError(kModule, std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
}

// f(x, y) -> value; da(x, y, out) and db(x, y, out) -> local partials.
template <class F, class DA, class DB>
Tensor binary(const Tensor& a, const Tensor& b, const char* op, F f, DA da, DB db) {
  const Broadcast mode = classify(a, b, op);
  const Shape shape = mode == Broadcast::kScalarA ? b.shape() : a.shape();
  const std::size_t n = shape_numel(shape);
  const std::size_t step_a = mode == Broadcast::kScalarA ? 0 : 1;
  const std::size_t step_b = mode == Broadcast::kScalarB ? 0 : 1;
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i * step_a], bv[i * step_b]);
  return detail::make_result(shape, std::move(out), {a, b}, [=](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    const auto& g = self.grad;
    if (na.requires_grad) {
      auto& ga = na.grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        ga[i * step_a] += g[i] * da(na.value[i * step_a], nb.value[i * step_b], self.value[i]);
      }
    }
    if (nb.requires_grad) {
      auto& gb = nb.grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        gb[i * step_b] += g[i] * db(na.value[i * step_a], nb.value[i * step_b], self.value[i]);
      }
    }
  });
}

// f(x) -> value; df(x, out) -> derivative.
template <class F, class DF>
Tensor unary(const Tensor& a, F f, DF df) {
  const auto av = a.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  return detail::make_result(a.shape(), std::move(out), {a}, [=](Node& self) {
    Node& in = *self.inputs[0];
    auto& gi = in.grad_buffer();
    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += self.grad[i] * df(in.value[i], self.value[i]);
  });
}

double sgn(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t length = 1;
  std::size_t inner = 1;
  Shape out_shape;
};

AxisSplit split_axis(const Tensor& a, std::optional<std::size_t> axis, const char* op) {
  AxisSplit s;
  const Shape& shape = a.shape();
  if (!axis) {
    s.length = a.numel();
    s.out_shape = {1};
    return s;
  }
  if (*axis >= shape.size()) {
    throw DimensionError(kModule, std::string(op) + ": axis " + std::to_string(*axis) +
                                      " out of range for shape " + shape_str(shape));
  }
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (d < *axis) s.outer *= shape[d];
    if (d > *axis) s.inner *= shape[d];
    if (d != *axis) s.out_shape.push_back(shape[d]);
  }
  s.length = shape[*axis];
  if (s.out_shape.empty()) s.out_shape = {1};
  return s;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y, double) { return y; },
      [](double x, double, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "div", [](double x, double y) { return x / y; }, [](double, double y, double) { return 1.0 / y; },
      [](double x, double y, double) { return -x / (y * y); });
}

Tensor neg(const Tensor& a) {
  return unary(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor abs(const Tensor& a) {
  return unary(a, [](double x) { return std::fabs(x); }, [](double x, double) { return sgn(x); });
}

Tensor sign(const Tensor& a) {
  return unary(a, sgn, [](double, double) { return 0.0; });
}

Tensor exp(const Tensor& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  for (double x : a.data()) {
    if (!(x > 0.0)) throw DomainError(kModule, "log of non-positive value " + std::to_string(x));
  }
  return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(const Tensor& a) {
  for (double x : a.data()) {
    if (!(x >= 0.0)) throw DomainError(kModule, "sqrt of negative value " + std::to_string(x));
  }
  return unary(a, [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

Tensor relu(const Tensor& a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor softplus(const Tensor& a) {
  return unary(
      a, [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); },
      [](double x, double) { return 1.0 / (1.0 + std::exp(-x)); });
}

Tensor power(const Tensor& base, double exponent) {
  if (exponent != std::floor(exponent)) {
    for (double x : base.data()) {
      if (x < 0.0) throw DomainError(kModule, "non-integer power of negative value " + std::to_string(x));
    }
  }
  return unary(
      base, [exponent](double x) { return std::pow(x, exponent); },
      [exponent](double x, double) { return exponent * std::pow(x, exponent - 1.0); });
}

Tensor power(const Tensor& base, const Tensor& exponent) {
  for (double x : base.data()) {
    if (!(x > 0.0)) {
      throw DomainError(kModule, "power with tensor exponent needs a positive base, got " + std::to_string(x));
    }
  }
  return binary(
      base, exponent, "power", [](double x, double e) { return std::pow(x, e); },
      [](double x, double e, double) { return e * std::pow(x, e - 1.0); },
      [](double x, double, double y) { return y * std::log(x); });
}

Tensor signed_power(const Tensor& base, const Tensor& exponent) {
  for (double p : exponent.data()) {
    if (!(p > 0.0)) throw ContractError(kModule, "signed_power exponent must be positive, got " + std::to_string(p));
  }
  return binary(
      base, exponent, "signed_power",
      [](double s, double p) { return s == 0.0 ? 0.0 : sgn(s) * std::pow(std::fabs(s), p); },
      [](double s, double p, double) {
        if (s == 0.0) return p == 1.0 ? 1.0 : 0.0;
        return p * std::pow(std::fabs(s), p - 1.0);
      },
      [](double s, double, double y) { return s == 0.0 ? 0.0 : y * std::log(std::fabs(s)); });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw DimensionError(kModule, "matmul expects matrices, got " + shape_str(a.shape()) + " and " +
                                      shape_str(b.shape()));
  }
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) {
    throw DimensionError(kModule, "matmul inner dimensions differ: " + shape_str(a.shape()) + " x " +
                                      shape_str(b.shape()));
  }
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double x = av[i * k + p];
      if (x == 0.0) continue;
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += x * brow[j];
    }
  }
  return detail::make_result({m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    const auto& g = self.grad;
    if (na.requires_grad) {
      auto& ga = na.grad_buffer();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * nb.value[p * n + j];
          ga[i * k + p] += acc;
        }
      }
    }
    if (nb.requires_grad) {
      auto& gb = nb.grad_buffer();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double x = na.value[i * k + p];
          if (x == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += x * g[i * n + j];
        }
      }
    }
  });
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) throw DimensionError(kModule, "transpose expects a matrix, got " + shape_str(a.shape()));
  const std::size_t r = a.shape()[0], c = a.shape()[1];
  const auto av = a.data();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  return detail::make_result({c, r}, std::move(out), {a}, [r, c](Node& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) gi[i * c + j] += self.grad[j * r + i];
  });
}

Tensor sum(const Tensor& a, std::optional<std::size_t> axis) {
  const AxisSplit s = split_axis(a, axis, "sum");
  const auto av = a.data();
  std::vector<double> out(s.outer * s.inner, 0.0);
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t l = 0; l < s.length; ++l)
      for (std::size_t i = 0; i < s.inner; ++i) out[o * s.inner + i] += av[(o * s.length + l) * s.inner + i];
  return detail::make_result(s.out_shape, std::move(out), {a}, [s](Node& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t l = 0; l < s.length; ++l)
        for (std::size_t i = 0; i < s.inner; ++i) gi[(o * s.length + l) * s.inner + i] += self.grad[o * s.inner + i];
  });
}

Tensor mean(const Tensor& a, std::optional<std::size_t> axis) {
  const AxisSplit s = split_axis(a, axis, "mean");
  return mul(sum(a, axis), Tensor::scalar(1.0 / static_cast<double>(s.length)));
}

Tensor max(const Tensor& a, std::optional<std::size_t> axis) {
  const AxisSplit s = split_axis(a, axis, "max");
  const auto av = a.data();
  std::vector<double> out(s.outer * s.inner);
  std::vector<std::size_t> arg(s.outer * s.inner);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      std::size_t best = o * s.length * s.inner + i;
      for (std::size_t l = 1; l < s.length; ++l) {
        const std::size_t idx = (o * s.length + l) * s.inner + i;
        if (av[idx] > av[best]) best = idx;
      }
      out[o * s.inner + i] = av[best];
      arg[o * s.inner + i] = best;
    }
  }
  return detail::make_result(s.out_shape, std::move(out), {a}, [arg = std::move(arg)](Node& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    for (std::size_t j = 0; j < arg.size(); ++j) gi[arg[j]] += self.grad[j];
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw DimensionError(kModule, "cannot reshape " + shape_str(a.shape()) + " to " + shape_str(shape));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  return detail::make_result(std::move(shape), std::move(out), {a}, [](Node& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += self.grad[i];
  });
}

Tensor gather(const Tensor& a, IndexTable indices, Shape shape) {
  if (!indices || indices->size() != shape_numel(shape)) {
    throw DimensionError(kModule, "gather: index table does not match shape " + shape_str(shape));
  }
  const auto av = a.data();
  std::vector<double> out(indices->size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint32_t idx = (*indices)[i];
    if (idx >= av.size()) {
      throw DimensionError(kModule, "gather: index " + std::to_string(idx) + " out of range for " +
                                        shape_str(a.shape()));
    }
    out[i] = av[idx];
  }
  return detail::make_result(std::move(shape), std::move(out), {a}, [indices](Node& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    const auto& idx = *indices;
    for (std::size_t i = 0; i < idx.size(); ++i) gi[idx[i]] += self.grad[i];
  });
}

Tensor tile_rows(const Tensor& v, std::size_t rows) {
  if (rows == 0) throw DimensionError(kModule, "tile_rows: zero rows");
  const std::size_t n = v.numel();
  const auto vv = v.data();
  std::vector<double> out(rows * n);
  for (std::size_t r = 0; r < rows; ++r) std::copy(vv.begin(), vv.end(), out.begin() + static_cast<long>(r * n));
  return detail::make_result({rows, n}, std::move(out), {v}, [rows, n](Node& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < n; ++j) gi[j] += self.grad[r * n + j];
  });
}

Tensor row_norm(const Tensor& a) {
  if (a.rank() != 2) throw DimensionError(kModule, "row_norm expects a matrix, got " + shape_str(a.shape()));
  const std::size_t rows = a.shape()[0], n = a.shape()[1];
  const auto av = a.data();
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += av[r * n + j] * av[r * n + j];
    out[r] = std::sqrt(acc);
  }
  return detail::make_result({rows, 1}, std::move(out), {a}, [rows, n](Node& self) {
    Node& in = *self.inputs[0];
    auto& gi = in.grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      const double norm = self.value[r];
      if (norm == 0.0) continue;
      const double scale = self.grad[r] / norm;
      for (std::size_t j = 0; j < n; ++j) gi[r * n + j] += scale * in.value[r * n + j];
    }
  });
}

}  // namespace scsnet
