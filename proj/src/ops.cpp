#include "sgl/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace sgl {

namespace {

bool should_record(std::initializer_list<const Tensor*> inputs) {
  if (!Tape::current()) return false;
  for (const Tensor* t : inputs)
    if (t->requires_grad()) return true;
  return false;
}

void mark(Tensor& out, bool recorded) { out.set_requires_grad(recorded); }

// Broadcast layout for binary elementwise ops: identical shapes, a 1-element
// operand, or the smaller shape being a trailing suffix of the larger.
struct Broadcast {
  int64_t n_out;
  int64_t n_a;
  int64_t n_b;
  Shape out_shape;
};

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  for (size_t i = 0; i < small.size(); ++i)
    if (small[small.size() - 1 - i] != big[big.size() - 1 - i]) return false;
  return true;
}

Broadcast broadcast_of(const char* op, Tensor a, Tensor b) {
  Broadcast bc;
  bc.n_a = a.numel();
  bc.n_b = b.numel();
  if (a.shape() == b.shape() || bc.n_b == 1 || is_suffix(b.shape(), a.shape())) {
    bc.out_shape = a.shape();
  } else if (bc.n_a == 1 || is_suffix(a.shape(), b.shape())) {
    bc.out_shape = b.shape();
  } else {
    fail("shape_error", std::string(op) + ": shapes " + shape_str(a.shape()) +
                            " and " + shape_str(b.shape()) +
                            " are not broadcast-compatible");
  }
  bc.n_out = shape_numel(bc.out_shape);
  return bc;
}

void check_2d(const char* op, const Tensor& t) {
  if (t.rank() != 2)
    fail("shape_error",
         std::string(op) + ": expected 2-D tensor, got " + shape_str(t.shape()));
}

}  // namespace

Tensor matmul(Tensor a, Tensor b) {
  check_2d("matmul", a);
  check_2d("matmul", b);
  const int64_t m = a.dim(0), k = a.dim(1), k2 = b.dim(0), n = b.dim(1);
  if (k != k2)
    fail("shape_error", "matmul: inner dimensions disagree, " +
                            shape_str(a.shape()) + " x " + shape_str(b.shape()));
  Tensor out = Tensor::zeros({m, n});
  {
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* pc = out.data().data();
    for (int64_t i = 0; i < m; ++i) {
      const double* ai = pa + i * k;
      double* ci = pc + i * n;
      for (int64_t kk = 0; kk < k; ++kk) {
        const double av = ai[kk];
        if (av == 0.0) continue;
        const double* bk = pb + kk * n;
        for (int64_t j = 0; j < n; ++j) ci[j] += av * bk[j];
      }
    }
  }
  const bool rec = should_record({&a, &b});
  mark(out, rec);
  if (rec) {
    Tape::record([a, b, out, m, k, n]() mutable {
      if (!out.has_grad()) return;
      const double* gc = out.grad().data();
      if (a.requires_grad()) {
        // dA = dC * B^T
        double* ga = a.grad().data();
        const double* pb = b.data().data();
        for (int64_t i = 0; i < m; ++i)
          for (int64_t kk = 0; kk < k; ++kk) {
            double acc = 0.0;
            const double* gci = gc + i * n;
            const double* bk = pb + kk * n;
            for (int64_t j = 0; j < n; ++j) acc += gci[j] * bk[j];
            ga[i * k + kk] += acc;
          }
      }
      if (b.requires_grad()) {
        // dB = A^T * dC
        double* gb = b.grad().data();
        const double* pa = a.data().data();
        for (int64_t i = 0; i < m; ++i) {
          const double* ai = pa + i * k;
          const double* gci = gc + i * n;
          for (int64_t kk = 0; kk < k; ++kk) {
            const double av = ai[kk];
            if (av == 0.0) continue;
            double* gbk = gb + kk * n;
            for (int64_t j = 0; j < n; ++j) gbk[j] += av * gci[j];
          }
        }
      }
    });
  }
  return out;
}

Tensor transpose(Tensor a) {
  check_2d("transpose", a);
  const int64_t m = a.dim(0), n = a.dim(1);
  Tensor out = Tensor::zeros({n, m});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j)
      out.data()[j * m + i] = a.data()[i * n + j];
  const bool rec = should_record({&a});
  mark(out, rec);
  if (rec) {
    Tape::record([a, out, m, n]() mutable {
      if (!out.has_grad() || !a.requires_grad()) return;
      double* ga = a.grad().data();
      const double* go = out.grad().data();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) ga[i * n + j] += go[j * m + i];
    });
  }
  return out;
}

namespace {

// Shared core for add/sub/mul. Partials: out = f(a,b) elementwise with
// constant partials wrt the same index mapping used forward.
enum class BinKind { add, sub, mul };

Tensor binary_op(const char* name, BinKind kind, Tensor a,
                 Tensor b) {
  Broadcast bc = broadcast_of(name, a, b);
  Tensor out = Tensor::zeros(bc.out_shape);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  const int64_t na = bc.n_a, nb = bc.n_b;
  for (int64_t i = 0; i < bc.n_out; ++i) {
    const double x = pa[i % na], y = pb[i % nb];
    po[i] = kind == BinKind::add ? x + y : kind == BinKind::sub ? x - y : x * y;
  }
  const bool rec = should_record({&a, &b});
  mark(out, rec);
  if (rec) {
    Tape::record([kind, a, b, out, bc]() mutable {
      if (!out.has_grad()) return;
      const double* go = out.grad().data();
      const int64_t na = bc.n_a, nb = bc.n_b;
      if (a.requires_grad()) {
        double* ga = a.grad().data();
        const double* pb = b.data().data();
        for (int64_t i = 0; i < bc.n_out; ++i) {
          const double g = go[i];
          ga[i % na] += kind == BinKind::mul ? g * pb[i % nb] : g;
        }
      }
      if (b.requires_grad()) {
        double* gb = b.grad().data();
        const double* pa = a.data().data();
        for (int64_t i = 0; i < bc.n_out; ++i) {
          const double g = go[i];
          gb[i % nb] += kind == BinKind::mul  ? g * pa[i % na]
                        : kind == BinKind::sub ? -g
                                                : g;
        }
      }
    });
  }
  return out;
}

// Elementwise unary with value-and-derivative callback.
template <typename F, typename DF>
Tensor unary_op(Tensor a, F f, DF df_from_xy) {
  Tensor out = Tensor::zeros(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) out.data()[i] = f(a.data()[i]);
  const bool rec = should_record({&a});
  mark(out, rec);
  if (rec) {
    Tape::record([a, out, df_from_xy]() mutable {
      if (!out.has_grad() || !a.requires_grad()) return;
      double* ga = a.grad().data();
      const double* go = out.grad().data();
      for (int64_t i = 0; i < a.numel(); ++i)
        ga[i] += go[i] * df_from_xy(a.data()[i], out.data()[i]);
    });
  }
  return out;
}

}  // namespace

Tensor add(Tensor a, Tensor b) { return binary_op("add", BinKind::add, a, b); }
Tensor sub(Tensor a, Tensor b) { return binary_op("sub", BinKind::sub, a, b); }
Tensor mul(Tensor a, Tensor b) { return binary_op("mul", BinKind::mul, a, b); }

Tensor scale(Tensor a, double c) {
  return unary_op(a, [c](double x) { return c * x; },
                  [c](double, double) { return c; });
}

Tensor add_scalar(Tensor a, double c) {
  return unary_op(a, [c](double x) { return x + c; },
                  [](double, double) { return 1.0; });
}

Tensor square(Tensor a) {
  return unary_op(a, [](double x) { return x * x; },
                  [](double x, double) { return 2.0 * x; });
}

Tensor log(Tensor a) {
  for (double x : a.data())
    if (!(x > 0.0))
      fail("domain_error", "log: input must be strictly positive, got " +
                               std::to_string(x));
  return unary_op(a, [](double x) { return std::log(x); },
                  [](double x, double) { return 1.0 / x; });
}

Tensor relu(Tensor a) {
  return unary_op(a, [](double x) { return x > 0.0 ? x : 0.0; },
                  [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(Tensor a) {
  return unary_op(a,
                  [](double x) {
                    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                    : std::exp(x) / (1.0 + std::exp(x));
                  },
                  [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(Tensor a) {
  return unary_op(a, [](double x) { return std::tanh(x); },
                  [](double, double y) { return 1.0 - y * y; });
}

Tensor clamp(Tensor a, double lo, double hi) {
  return unary_op(a,
                  [lo, hi](double x) { return std::min(std::max(x, lo), hi); },
                  [lo, hi](double x, double) {
                    return (x > lo && x < hi) ? 1.0 : 0.0;
                  });
}

Tensor softmax_temp(Tensor a, double tau) {
  if (!(tau > 0.0))
    fail("parameter_error",
         "softmax_temp: temperature must be positive, got " + std::to_string(tau));
  if (a.rank() < 1) fail("shape_error", "softmax_temp: rank-0 input");
  const int64_t n = a.shape().back();
  const int64_t rows = a.numel() / n;
  Tensor out = Tensor::zeros(a.shape());
  for (int64_t r = 0; r < rows; ++r) {
    const double* x = a.data().data() + r * n;
    double* y = out.data().data() + r * n;
    double mx = x[0];
    for (int64_t j = 1; j < n; ++j) mx = std::max(mx, x[j]);
    double z = 0.0;
    for (int64_t j = 0; j < n; ++j) {
      y[j] = std::exp((x[j] - mx) / tau);
      z += y[j];
    }
    for (int64_t j = 0; j < n; ++j) y[j] /= z;
  }
  const bool rec = should_record({&a});
  mark(out, rec);
  if (rec) {
    Tape::record([a, out, tau, n, rows]() mutable {
      if (!out.has_grad() || !a.requires_grad()) return;
      double* ga = a.grad().data();
      const double* go = out.grad().data();
      const double* y = out.data().data();
      for (int64_t r = 0; r < rows; ++r) {
        const double* gr = go + r * n;
        const double* yr = y + r * n;
        double dot = 0.0;
        for (int64_t j = 0; j < n; ++j) dot += gr[j] * yr[j];
        for (int64_t j = 0; j < n; ++j)
          ga[r * n + j] += yr[j] * (gr[j] - dot) / tau;
      }
    });
  }
  return out;
}

Tensor sum(Tensor a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  Tensor out = Tensor::scalar(s);
  const bool rec = should_record({&a});
  mark(out, rec);
  if (rec) {
    Tape::record([a, out]() mutable {
      if (!out.has_grad() || !a.requires_grad()) return;
      const double g = out.grad()[0];
      for (double& x : a.grad()) x += g;
    });
  }
  return out;
}

Tensor mean(Tensor a) {
  const double inv = 1.0 / static_cast<double>(a.numel());
  double s = 0.0;
  for (double x : a.data()) s += x;
  Tensor out = Tensor::scalar(s * inv);
  const bool rec = should_record({&a});
  mark(out, rec);
  if (rec) {
    Tape::record([a, out, inv]() mutable {
      if (!out.has_grad() || !a.requires_grad()) return;
      const double g = out.grad()[0] * inv;
      for (double& x : a.grad()) x += g;
    });
  }
  return out;
}

Tensor row_sums(Tensor a) {
  check_2d("row_sums", a);
  const int64_t m = a.dim(0), n = a.dim(1);
  Tensor out = Tensor::zeros({m});
  for (int64_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (int64_t j = 0; j < n; ++j) s += a.data()[i * n + j];
    out.data()[i] = s;
  }
  const bool rec = should_record({&a});
  mark(out, rec);
  if (rec) {
    Tape::record([a, out, m, n]() mutable {
      if (!out.has_grad() || !a.requires_grad()) return;
      double* ga = a.grad().data();
      const double* go = out.grad().data();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) ga[i * n + j] += go[i];
    });
  }
  return out;
}

Tensor rows_scaled(Tensor a, Tensor s) {
  check_2d("rows_scaled", a);
  if (s.rank() != 1 || s.dim(0) != a.dim(0))
    fail("shape_error", "rows_scaled: scale shape " + shape_str(s.shape()) +
                            " does not match rows of " + shape_str(a.shape()));
  const int64_t m = a.dim(0), n = a.dim(1);
  Tensor out = Tensor::zeros(a.shape());
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j)
      out.data()[i * n + j] = a.data()[i * n + j] * s.data()[i];
  const bool rec = should_record({&a, &s});
  mark(out, rec);
  if (rec) {
    Tape::record([a, s, out, m, n]() mutable {
      if (!out.has_grad()) return;
      const double* go = out.grad().data();
      if (a.requires_grad()) {
        double* ga = a.grad().data();
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n; ++j)
            ga[i * n + j] += go[i * n + j] * s.data()[i];
      }
      if (s.requires_grad()) {
        double* gs = s.grad().data();
        for (int64_t i = 0; i < m; ++i) {
          double acc = 0.0;
          for (int64_t j = 0; j < n; ++j)
            acc += go[i * n + j] * a.data()[i * n + j];
          gs[i] += acc;
        }
      }
    });
  }
  return out;
}

Tensor safe_reciprocal(Tensor a) {
  return unary_op(a, [](double x) { return x > 0.0 ? 1.0 / x : 0.0; },
                  [](double x, double y) { return x > 0.0 ? -y * y : 0.0; });
}

Tensor concat(std::vector<Tensor> parts, int axis) {
  if (parts.empty()) fail("shape_error", "concat: no inputs");
  if (axis != 0 && axis != 1) fail("shape_error", "concat: axis must be 0 or 1");
  for (const Tensor& p : parts) check_2d("concat", p);
  const int64_t fixed = axis == 0 ? parts[0].dim(1) : parts[0].dim(0);
  int64_t total = 0;
  for (const Tensor& p : parts) {
    const int64_t f = axis == 0 ? p.dim(1) : p.dim(0);
    if (f != fixed)
      fail("shape_error", "concat: mismatched shapes " +
                              shape_str(parts[0].shape()) + " vs " +
                              shape_str(p.shape()));
    total += axis == 0 ? p.dim(0) : p.dim(1);
  }
  const int64_t m = axis == 0 ? total : fixed;
  const int64_t n = axis == 0 ? fixed : total;
  Tensor out = Tensor::zeros({m, n});
  int64_t off = 0;
  for (const Tensor& p : parts) {
    const int64_t pm = p.dim(0), pn = p.dim(1);
    if (axis == 0) {
      std::memcpy(out.data().data() + off * n, p.data().data(),
                  static_cast<size_t>(pm * pn) * sizeof(double));
      off += pm;
    } else {
      for (int64_t i = 0; i < pm; ++i)
        std::memcpy(out.data().data() + i * n + off, p.data().data() + i * pn,
                    static_cast<size_t>(pn) * sizeof(double));
      off += pn;
    }
  }
  bool rec = false;
  if (Tape::current())
    for (const Tensor& p : parts)
      if (p.requires_grad()) rec = true;
  mark(out, rec);
  if (rec) {
    Tape::record([parts, out, axis, n]() mutable {
      if (!out.has_grad()) return;
      const double* go = out.grad().data();
      int64_t off = 0;
      for (Tensor& p : parts) {
        const int64_t pm = p.dim(0), pn = p.dim(1);
        if (p.requires_grad()) {
          double* gp = p.grad().data();
          if (axis == 0) {
            for (int64_t i = 0; i < pm * pn; ++i) gp[i] += go[off * n + i];
          } else {
            for (int64_t i = 0; i < pm; ++i)
              for (int64_t j = 0; j < pn; ++j)
                gp[i * pn + j] += go[i * n + off + j];
          }
        }
        off += axis == 0 ? pm : pn;
      }
    });
  }
  return out;
}

Tensor slice_rows(Tensor a, int64_t r0, int64_t r1) {
  check_2d("slice_rows", a);
  if (r0 < 0 || r1 > a.dim(0) || r0 >= r1)
    fail("shape_error", "slice_rows: range [" + std::to_string(r0) + "," +
                            std::to_string(r1) + ") invalid for " +
                            shape_str(a.shape()));
  const int64_t n = a.dim(1);
  Tensor out = Tensor::zeros({r1 - r0, n});
  std::memcpy(out.data().data(), a.data().data() + r0 * n,
              static_cast<size_t>((r1 - r0) * n) * sizeof(double));
  const bool rec = should_record({&a});
  mark(out, rec);
  if (rec) {
    Tape::record([a, out, r0, n]() mutable {
      if (!out.has_grad() || !a.requires_grad()) return;
      double* ga = a.grad().data();
      const double* go = out.grad().data();
      for (int64_t i = 0; i < out.numel(); ++i) ga[r0 * n + i] += go[i];
    });
  }
  return out;
}

Tensor slice_cols(Tensor a, int64_t c0, int64_t c1) {
  check_2d("slice_cols", a);
  if (c0 < 0 || c1 > a.dim(1) || c0 >= c1)
    fail("shape_error", "slice_cols: range [" + std::to_string(c0) + "," +
                            std::to_string(c1) + ") invalid for " +
                            shape_str(a.shape()));
  const int64_t m = a.dim(0), n = a.dim(1), w = c1 - c0;
  Tensor out = Tensor::zeros({m, w});
  for (int64_t i = 0; i < m; ++i)
    std::memcpy(out.data().data() + i * w, a.data().data() + i * n + c0,
                static_cast<size_t>(w) * sizeof(double));
  const bool rec = should_record({&a});
  mark(out, rec);
  if (rec) {
    Tape::record([a, out, c0, m, n, w]() mutable {
      if (!out.has_grad() || !a.requires_grad()) return;
      double* ga = a.grad().data();
      const double* go = out.grad().data();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < w; ++j) ga[i * n + c0 + j] += go[i * w + j];
    });
  }
  return out;
}

Tensor embedding_lookup(Tensor table, const std::vector<int>& ids) {
  check_2d("embedding_lookup", table);
  const int64_t v = table.dim(0), d = table.dim(1);
  for (int id : ids)
    if (id < 0 || id >= v)
      fail("vocab_error", "embedding_lookup: id " + std::to_string(id) +
                              " out of range [0," + std::to_string(v) + ")");
  const int64_t L = static_cast<int64_t>(ids.size());
  Tensor out = Tensor::zeros({L, d});
  for (int64_t l = 0; l < L; ++l)
    std::memcpy(out.data().data() + l * d, table.data().data() + ids[l] * d,
                static_cast<size_t>(d) * sizeof(double));
  const bool rec = should_record({&table});
  mark(out, rec);
  if (rec) {
    Tape::record([table, out, ids, d]() mutable {
      if (!out.has_grad() || !table.requires_grad()) return;
      double* gt = table.grad().data();
      const double* go = out.grad().data();
      for (size_t l = 0; l < ids.size(); ++l)
        for (int64_t j = 0; j < d; ++j)
          gt[static_cast<int64_t>(ids[l]) * d + j] += go[l * d + j];
    });
  }
  return out;
}

Tensor take_per_row(Tensor a, const std::vector<int>& ids) {
  check_2d("take_per_row", a);
  const int64_t m = a.dim(0), n = a.dim(1);
  if (static_cast<int64_t>(ids.size()) != m)
    fail("shape_error", "take_per_row: " + std::to_string(ids.size()) +
                            " indices for " + std::to_string(m) + " rows");
  for (int id : ids)
    if (id < 0 || id >= n)
      fail("label_error", "take_per_row: index " + std::to_string(id) +
                              " out of range [0," + std::to_string(n) + ")");
  Tensor out = Tensor::zeros({m});
  for (int64_t i = 0; i < m; ++i) out.data()[i] = a.data()[i * n + ids[i]];
  const bool rec = should_record({&a});
  mark(out, rec);
  if (rec) {
    Tape::record([a, out, ids, n]() mutable {
      if (!out.has_grad() || !a.requires_grad()) return;
      double* ga = a.grad().data();
      const double* go = out.grad().data();
      for (size_t i = 0; i < ids.size(); ++i)
        ga[static_cast<int64_t>(i) * n + ids[i]] += go[i];
    });
  }
  return out;
}

Tensor layer_norm(Tensor x, Tensor gamma, Tensor beta,
                  double eps) {
  if (x.rank() < 1) fail("shape_error", "layer_norm: rank-0 input");
  const int64_t n = x.shape().back();
  if (gamma.numel() != n || beta.numel() != n)
    fail("shape_error", "layer_norm: affine params must have " +
                            std::to_string(n) + " elements");
  const int64_t rows = x.numel() / n;
  Tensor out = Tensor::zeros(x.shape());
  std::vector<double> inv_sigma(static_cast<size_t>(rows));
  std::vector<double> xhat(static_cast<size_t>(x.numel()));
  for (int64_t r = 0; r < rows; ++r) {
    const double* xr = x.data().data() + r * n;
    double mu = 0.0;
    for (int64_t j = 0; j < n; ++j) mu += xr[j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (int64_t j = 0; j < n; ++j) var += (xr[j] - mu) * (xr[j] - mu);
    var /= static_cast<double>(n);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_sigma[static_cast<size_t>(r)] = is;
    for (int64_t j = 0; j < n; ++j) {
      const double h = (xr[j] - mu) * is;
      xhat[static_cast<size_t>(r * n + j)] = h;
      out.data()[r * n + j] = h * gamma.data()[j] + beta.data()[j];
    }
  }
  const bool rec = should_record({&x, &gamma, &beta});
  mark(out, rec);
  if (rec) {
    Tape::record([x, gamma, beta, out, n, rows, inv_sigma, xhat]() mutable {
      if (!out.has_grad()) return;
      const double* go = out.grad().data();
      for (int64_t r = 0; r < rows; ++r) {
        const double is = inv_sigma[static_cast<size_t>(r)];
        const double* hr = xhat.data() + r * n;
        const double* gr = go + r * n;
        if (x.requires_grad()) {
          // dL/dx = is * (g - mean(g) - xhat * mean(g*xhat)), g = dy*gamma
          double mg = 0.0, mgh = 0.0;
          for (int64_t j = 0; j < n; ++j) {
            const double g = gr[j] * gamma.data()[j];
            mg += g;
            mgh += g * hr[j];
          }
          mg /= static_cast<double>(n);
          mgh /= static_cast<double>(n);
          double* gx = x.grad().data() + r * n;
          for (int64_t j = 0; j < n; ++j) {
            const double g = gr[j] * gamma.data()[j];
            gx[j] += is * (g - mg - hr[j] * mgh);
          }
        }
        if (gamma.requires_grad()) {
          double* gg = gamma.grad().data();
          for (int64_t j = 0; j < n; ++j) gg[j] += gr[j] * hr[j];
        }
        if (beta.requires_grad()) {
          double* gb = beta.grad().data();
          for (int64_t j = 0; j < n; ++j) gb[j] += gr[j];
        }
      }
    });
  }
  return out;
}

Tensor straight_through(Tensor p, const std::vector<double>& hard) {
  if (static_cast<int64_t>(hard.size()) != p.numel())
    fail("shape_error", "straight_through: hard values size " +
                            std::to_string(hard.size()) + " vs " +
                            shape_str(p.shape()));
  Tensor out = Tensor::from(p.shape(), hard);
  const bool rec = should_record({&p});
  mark(out, rec);
  if (rec) {
    Tape::record([p, out]() mutable {
      if (!out.has_grad() || !p.requires_grad()) return;
      double* gp = p.grad().data();
      const double* go = out.grad().data();
      for (int64_t i = 0; i < p.numel(); ++i) gp[i] += go[i];
    });
  }
  return out;
}

Tensor matrix_from_entries(int64_t rows, int64_t cols,
                           std::vector<MatrixEntry> entries) {
  Tensor out = Tensor::zeros({rows, cols});
  for (const MatrixEntry& e : entries) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      fail("shape_error", "matrix_from_entries: position (" +
                              std::to_string(e.row) + "," +
                              std::to_string(e.col) + ") outside " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    if (e.value.numel() != 1)
      fail("shape_error", "matrix_from_entries: entry must be scalar, got " +
                              shape_str(e.value.shape()));
    out.data()[e.row * cols + e.col] = e.value.data()[0];
  }
  bool rec = false;
  if (Tape::current())
    for (const MatrixEntry& e : entries)
      if (e.value.requires_grad()) rec = true;
  mark(out, rec);
  if (rec) {
    Tape::record([entries, out, cols]() mutable {
      if (!out.has_grad()) return;
      const double* go = out.grad().data();
      for (const MatrixEntry& e : entries) {
        if (!e.value.requires_grad()) continue;
        Tensor v = e.value;
        v.grad()[0] += go[e.row * cols + e.col];
      }
    });
  }
  return out;
}

}  // namespace sgl
