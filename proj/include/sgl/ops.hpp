#pragma once

#include <vector>

#include "sgl/tensor.hpp"

namespace sgl {

// Differentiable op set. All ops run forward immediately and, when a Tape is
// active and some input requires grad, append the matching backward step.
//
// Shape conventions: features are 2-D row-major matrices, biases/masks/ranks
// are 1-D vectors, scalars have shape {1}. Binary elementwise ops accept
// equal shapes, a 1-element operand, or an operand whose shape is a trailing
// suffix of the other's (tiled along the leading dims).

Tensor matmul(Tensor a, Tensor b);
Tensor transpose(Tensor a);

Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor mul(Tensor a, Tensor b);  // hadamard
Tensor scale(Tensor a, double c);
Tensor add_scalar(Tensor a, double c);

Tensor square(Tensor a);
Tensor log(Tensor a);  // domain error on non-positive input
Tensor relu(Tensor a);
Tensor sigmoid(Tensor a);
Tensor tanh(Tensor a);
Tensor clamp(Tensor a, double lo, double hi);

// Softmax along the last dimension with temperature tau > 0, computed with
// max subtraction.
Tensor softmax_temp(Tensor a, double tau);

Tensor sum(Tensor a);   // -> {1}
Tensor mean(Tensor a);  // -> {1}

Tensor row_sums(Tensor a);                    // [m×n] -> {m}
Tensor rows_scaled(Tensor a, Tensor s);  // row i scaled by s[i]

// Elementwise x>0 ? 1/x : 0. The zero branch has zero gradient.
Tensor safe_reciprocal(Tensor a);

Tensor concat(std::vector<Tensor> parts, int axis);  // 2-D, axis 0|1
Tensor slice_rows(Tensor a, int64_t r0, int64_t r1);
Tensor slice_cols(Tensor a, int64_t c0, int64_t c1);

// Rows of table selected by ids; repeated ids accumulate gradient.
Tensor embedding_lookup(Tensor table, const std::vector<int>& ids);

// Picks a[r, ids[r]] for each row -> {m}.
Tensor take_per_row(Tensor a, const std::vector<int>& ids);

// Normalizes each row over the last dimension: (x-mu)/sqrt(var+eps)*gamma+beta.
Tensor layer_norm(Tensor x, Tensor gamma, Tensor beta,
                  double eps = 1e-5);

// Forward takes the hard values exactly; backward routes the incoming
// gradient to p unchanged (straight-through).
Tensor straight_through(Tensor p, const std::vector<double>& hard);

// Dense [rows×cols] matrix with entry tensors (each shape {1} or {1×1})
// placed at their positions; unset entries are exactly zero.
struct MatrixEntry {
  int64_t row;
  int64_t col;
  Tensor value;
};
Tensor matrix_from_entries(int64_t rows, int64_t cols,
                           std::vector<MatrixEntry> entries);

}  // namespace sgl
