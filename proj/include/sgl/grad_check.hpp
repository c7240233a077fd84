#pragma once

#include <functional>
#include <vector>

#include "sgl/tensor.hpp"

namespace sgl {

// Central finite differences against reverse-mode gradients.
//
// f must rebuild its expression from the current values of `inputs` on every
// call and return a scalar; it must not create its own Tape. Inputs are
// perturbed in place and restored. Relative error per coordinate is
// |analytic - numeric| / max(1, |analytic|, |numeric|).
struct GradCheckReport {
  double max_rel_error = 0.0;
  size_t worst_input = 0;
  int64_t worst_coord = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

GradCheckReport grad_check(const std::function<Tensor()>& f,
                           std::vector<Tensor> inputs, double step = 1e-3);

}  // namespace sgl
