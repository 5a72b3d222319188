#include "scsnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "scsnet/error.hpp"

namespace scsnet {

double finite_difference_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double eps) {
  Tensor leaf(x.shape(), std::vector<double>(x.data().begin(), x.data().end()), true);
  return finite_difference_check([&] { return f(leaf); }, {leaf}, eps);
}

double finite_difference_check(const std::function<Tensor()>& f, std::vector<Tensor> params, double eps) {
  if (!(eps > 0.0)) throw ContractError("tensor-autodiff", "finite difference step must be positive");
  for (auto& p : params) {
    if (!p.requires_grad() || !p.is_leaf()) {
      throw ContractError("tensor-autodiff", "finite_difference_check needs leaf tensors requiring grad");
    }
    p.zero_grad();
  }

  f().backward();
  std::vector<std::vector<double>> analytic;
  for (const auto& p : params) {
    const auto g = p.grad();
    analytic.emplace_back(p.numel(), 0.0);
    std::copy(g.begin(), g.end(), analytic.back().begin());
  }

  NoGradGuard no_grad;
  double worst = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto values = params[t].mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      // Divide by the step actually taken after rounding.
      const double hi = saved + eps, lo = saved - eps;
      values[i] = hi;
      const double up = f().item();
      values[i] = lo;
      const double down = f().item();
      values[i] = saved;
      const double numeric = (up - down) / (hi - lo);
      const double a = analytic[t][i];
      const double err = std::fabs(a - numeric) / std::max(1.0, std::fabs(a));
      worst = std::max(worst, std::isnan(err) ? INFINITY : err);
    }
  }
  for (auto& p : params) p.zero_grad();
  return worst;
}

}  // namespace scsnet
