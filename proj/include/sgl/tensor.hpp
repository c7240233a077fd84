#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgl {

// Error with a machine-readable category; the CLI prints it as a single
// "error category=<cat>: <message>" line and exits nonzero.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}
  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

[[noreturn]] void fail(const std::string& category, const std::string& message);

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

namespace detail {
struct TensorData {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // sized lazily during backward
  bool requires_grad = false;
};
}  // namespace detail

// Shared handle to a dense row-major tensor of doubles. Copying a Tensor
// aliases the same storage; every op returns a fresh tensor. Values are
// immutable by convention once an op has consumed them, except for the
// in-place mutation done by optimizers and the finite-difference checker
// between forward passes.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double v, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return d_ != nullptr; }
  const Shape& shape() const { return d_->shape; }
  int rank() const { return static_cast<int>(d_->shape.size()); }
  int64_t dim(int i) const { return d_->shape[static_cast<size_t>(i)]; }
  int64_t numel() const { return static_cast<int64_t>(d_->value.size()); }
  int64_t rows() const;  // 2-D only
  int64_t cols() const;

  std::vector<double>& data() { return d_->value; }
  const std::vector<double>& data() const { return d_->value; }
  double at(int64_t i) const { return d_->value[static_cast<size_t>(i)]; }
  double at(int64_t r, int64_t c) const;
  double item() const;  // numel()==1

  bool requires_grad() const { return d_->requires_grad; }
  void set_requires_grad(bool b) { d_->requires_grad = b; }

  // Gradient buffer, allocated (zero-filled) on first access.
  std::vector<double>& grad();
  const std::vector<double>& grad() const;
  bool has_grad() const { return !d_->grad.empty(); }
  void zero_grad();

  bool same_storage(const Tensor& other) const { return d_ == other.d_; }
  detail::TensorData* unsafe_data() const { return d_.get(); }

 private:
  std::shared_ptr<detail::TensorData> d_;
};

// Reverse-mode tape. Constructing a Tape makes it the active tape for the
// current thread; ops append backward steps while one is active. backward()
// replays the steps in exact reverse order and then discards them, so a tape
// covers a single forward/backward pass.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void backward(const Tensor& loss);
  size_t num_steps() const { return steps_.size(); }

  static Tape* current();
  // Appends a backward step to the active tape, if any. Exposed so tests and
  // custom ops can participate in autodiff.
  static void record(std::function<void()> backward_step);

 private:
  std::vector<std::function<void()>> steps_;
  Tape* prev_ = nullptr;
};

namespace detail {
// Accumulates `count` values from src into dst's grad buffer if dst requires
// grad. Helper shared by op backward implementations.
void accumulate_grad(Tensor& t, const std::vector<double>& contribution);
}  // namespace detail

}  // namespace sgl
