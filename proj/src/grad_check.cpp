#include "sgl/grad_check.hpp"

#include <cmath>

namespace sgl {

GradCheckReport grad_check(const std::function<Tensor()>& f,
                           std::vector<Tensor> inputs, double step) {
  for (Tensor& t : inputs) {
    t.set_requires_grad(true);
    t.zero_grad();
    for (double v : t.data())
      if (!std::isfinite(v))
        fail("oracle_error", "grad_check: non-finite input value");
  }

  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    Tensor loss = f();
    if (!loss.defined() || loss.numel() != 1)
      fail("contract_error", "grad_check: f must return a scalar");
    tape.backward(loss);
    for (Tensor& t : inputs)
      analytic.push_back(t.grad());  // zeros if unused by f
  }

  GradCheckReport report;
  for (size_t ti = 0; ti < inputs.size(); ++ti) {
    Tensor& t = inputs[ti];
    for (int64_t i = 0; i < t.numel(); ++i) {
      const double orig = t.data()[i];
      t.data()[i] = orig + step;
      const double f_plus = f().item();
      t.data()[i] = orig - step;
      const double f_minus = f().item();
      t.data()[i] = orig;
      const double numeric = (f_plus - f_minus) / (2.0 * step);
      if (!std::isfinite(numeric))
        fail("oracle_error", "grad_check: non-finite finite-difference estimate");
      const double a = analytic[ti][static_cast<size_t>(i)];
      const double rel = std::fabs(a - numeric) /
                         std::max({1.0, std::fabs(a), std::fabs(numeric)});
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_input = ti;
        report.worst_coord = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace sgl
