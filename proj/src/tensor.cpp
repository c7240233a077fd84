#include "sgl/tensor.hpp"

#include <sstream>

namespace sgl {

void fail(const std::string& category, const std::string& message) {
  throw Error(category, message);
}

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) os << ",";
    os << s[i];
  }
  os << "]";
  return os.str();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  Tensor t;
  t.d_ = std::make_shared<detail::TensorData>();
  t.d_->shape = std::move(shape);
  t.d_->value.assign(static_cast<size_t>(shape_numel(t.d_->shape)), 0.0);
  t.d_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::full(Shape shape, double v, bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  for (double& x : t.data()) x = v;
  return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> values,
                    bool requires_grad) {
  if (shape_numel(shape) != static_cast<int64_t>(values.size()))
    fail("shape_error", "tensor init: shape " + shape_str(shape) + " needs " +
                            std::to_string(shape_numel(shape)) +
                            " values, got " + std::to_string(values.size()));
  Tensor t;
  t.d_ = std::make_shared<detail::TensorData>();
  t.d_->shape = std::move(shape);
  t.d_->value = std::move(values);
  t.d_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return from({1}, {v}, requires_grad);
}

int64_t Tensor::rows() const {
  if (rank() != 2) fail("shape_error", "rows(): tensor is " + shape_str(shape()));
  return dim(0);
}

int64_t Tensor::cols() const {
  if (rank() != 2) fail("shape_error", "cols(): tensor is " + shape_str(shape()));
  return dim(1);
}

double Tensor::at(int64_t r, int64_t c) const {
  return d_->value[static_cast<size_t>(r * cols() + c)];
}

double Tensor::item() const {
  if (numel() != 1)
    fail("contract_error", "item(): tensor has " + std::to_string(numel()) +
                               " elements, expected 1");
  return d_->value[0];
}

std::vector<double>& Tensor::grad() {
  if (d_->grad.empty()) d_->grad.assign(d_->value.size(), 0.0);
  return d_->grad;
}

const std::vector<double>& Tensor::grad() const {
  if (d_->grad.empty())
    fail("contract_error", "grad(): no gradient present; run backward first");
  return d_->grad;
}

void Tensor::zero_grad() { d_->grad.clear(); }

namespace {
thread_local Tape* g_current_tape = nullptr;
}

Tape::Tape() {
  prev_ = g_current_tape;
  g_current_tape = this;
}

Tape::~Tape() { g_current_tape = prev_; }

Tape* Tape::current() { return g_current_tape; }

void Tape::record(std::function<void()> backward_step) {
  if (g_current_tape) g_current_tape->steps_.push_back(std::move(backward_step));
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1)
    fail("contract_error", "backward: loss must be a scalar tensor");
  if (steps_.empty())
    fail("contract_error", "backward: tape is empty");
  loss.unsafe_data()->grad.assign(1, 1.0);
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
  steps_.clear();
}

namespace detail {
void accumulate_grad(Tensor& t, const std::vector<double>& contribution) {
  if (!t.requires_grad()) return;
  auto& g = t.grad();
  for (size_t i = 0; i < g.size(); ++i) g[i] += contribution[i];
}
}  // namespace detail

}  // namespace sgl
