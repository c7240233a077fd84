#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sgl/rng.hpp"
#include "sgl/tensor.hpp"

namespace sgl {

// Ordered registry of named trainable tensors. Order of registration is the
// canonical order for the optimizer and for checkpoints, so construction must
// be deterministic.
class ParamStore {
 public:
  Tensor zeros(const std::string& name, Shape shape) {
    return insert(name, Tensor::zeros(std::move(shape), true));
  }

  Tensor full(const std::string& name, Shape shape, double v) {
    return insert(name, Tensor::full(std::move(shape), v, true));
  }

  Tensor uniform(const std::string& name, Shape shape, double lo, double hi,
                 Rng& rng) {
    Tensor t = Tensor::zeros(std::move(shape), true);
    for (double& x : t.data()) x = rng.uniform(lo, hi);
    return insert(name, t);
  }

  // Xavier-uniform for a [fan_in x fan_out] projection.
  Tensor xavier(const std::string& name, int64_t fan_in, int64_t fan_out,
                Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    return uniform(name, {fan_in, fan_out}, -limit, limit, rng);
  }

  const std::vector<std::pair<std::string, Tensor>>& entries() const {
    return entries_;
  }

  Tensor* find(const std::string& name) {
    for (auto& [n, t] : entries_)
      if (n == name) return &t;
    return nullptr;
  }

  void zero_grads() {
    for (auto& [n, t] : entries_) t.zero_grad();
  }

  int64_t total_size() const {
    int64_t n = 0;
    for (const auto& [name, t] : entries_) n += t.numel();
    return n;
  }

 private:
  Tensor insert(const std::string& name, Tensor t) {
    if (find(name)) fail("config_error", "duplicate parameter name " + name);
    entries_.emplace_back(name, t);
    return t;
  }

  std::vector<std::pair<std::string, Tensor>> entries_;
};

}  // namespace sgl
