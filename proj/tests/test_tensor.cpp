#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgl/grad_check.hpp"
#include "sgl/ops.hpp"
#include "sgl/rng.hpp"
#include "sgl/tensor.hpp"

using namespace sgl;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("matmul identity and hand values") {
  Tensor eye = Tensor::from({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  Rng rng(7);
  Tensor x = random_tensor({3, 3}, rng);
  Tensor y = matmul(eye, x);
  for (int64_t i = 0; i < 9; ++i) CHECK(y.at(i) == x.at(i));

  Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::from({2, 1}, {1, 1});
  Tensor c = matmul(a, b);
  CHECK(c.at(0, 0) == 3.0);
  CHECK(c.at(1, 0) == 7.0);
}

TEST_CASE("matmul shape error names both shapes") {
  Tensor a = Tensor::zeros({2, 3});
  Tensor b = Tensor::zeros({4, 2});
  try {
    matmul(a, b);
    FAIL("expected shape error");
  } catch (const Error& e) {
    CHECK(e.category() == "shape_error");
    CHECK(std::string(e.what()).find("[2,3]") != std::string::npos);
    CHECK(std::string(e.what()).find("[4,2]") != std::string::npos);
  }
}

TEST_CASE("matmul gradient vs finite differences") {
  Rng rng(11);
  Tensor a = random_tensor({4, 5}, rng);
  Tensor b = random_tensor({5, 2}, rng);
  auto f = [&]() { return sum(matmul(a, b)); };
  auto rep = grad_check(f, {a, b});
  CHECK(rep.max_rel_error < 1e-4);
}

TEST_CASE("softmax_temp basics") {
  Tensor x = Tensor::from({2}, {0, 0});
  Tensor y = softmax_temp(x, 0.5);
  CHECK(y.at(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(y.at(1) == doctest::Approx(0.5).epsilon(1e-12));

  Tensor x2 = Tensor::from({2}, {std::log(3.0), 0.0});
  Tensor y2 = softmax_temp(x2, 1.0);
  CHECK(y2.at(0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(y2.at(1) == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(softmax_temp(x, 0.0), Error);
}

TEST_CASE("softmax_temp rows sum to one") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Tensor x = random_tensor({4, 7}, rng, -30.0, 30.0);
    Tensor y = softmax_temp(x, 0.5 + rng.uniform());
    for (int64_t r = 0; r < 4; ++r) {
      double s = 0.0;
      for (int64_t j = 0; j < 7; ++j) s += y.at(r, j);
      CHECK(std::fabs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("sigmoid values and saturation") {
  Tensor z = sigmoid(Tensor::scalar(0.0));
  CHECK(z.item() == 0.5);
  Tensor s = sigmoid(Tensor::scalar(-100.0));
  CHECK(s.item() > 0.0);
  CHECK(s.item() <= 1e-40);
  CHECK(std::isfinite(s.item()));
}

TEST_CASE("elementwise hadamard and layer_norm") {
  Tensor a = Tensor::from({3}, {1, 2, 3});
  Tensor b = Tensor::from({3}, {4, 5, 6});
  Tensor h = mul(a, b);
  CHECK(h.at(0) == 4.0);
  CHECK(h.at(1) == 10.0);
  CHECK(h.at(2) == 18.0);

  // constant vector normalizes to zeros before the affine part
  Tensor c = Tensor::full({5}, 3.7);
  Tensor gamma = Tensor::full({5}, 1.0);
  Tensor beta = Tensor::zeros({5});
  Tensor n = layer_norm(c, gamma, beta);
  for (int64_t i = 0; i < 5; ++i) CHECK(std::fabs(n.at(i)) < 1e-12);
}

TEST_CASE("log domain error") {
  CHECK_THROWS_AS(log(Tensor::scalar(0.0)), Error);
  CHECK_THROWS_AS(log(Tensor::scalar(-1.0)), Error);
}

TEST_CASE("broadcast add rejects non-suffix shapes") {
  Tensor a = Tensor::zeros({3, 4});
  Tensor b = Tensor::zeros({3});
  CHECK_THROWS_AS(add(a, b), Error);
  Tensor row = Tensor::zeros({4});
  CHECK_NOTHROW(add(a, row));
}

TEST_CASE("backward fills ones for sum and 2x for sum of squares") {
  Rng rng(5);
  Tensor x = random_tensor({2, 3}, rng);
  x.set_requires_grad(true);
  {
    Tape tape;
    Tensor loss = sum(x);
    tape.backward(loss);
    for (double g : x.grad()) CHECK(g == 1.0);
  }
  x.zero_grad();
  {
    Tape tape;
    Tensor loss = sum(mul(x, x));
    tape.backward(loss);
    for (int64_t i = 0; i < x.numel(); ++i)
      CHECK(x.grad()[i] == doctest::Approx(2.0 * x.at(i)).epsilon(1e-12));
  }
}

TEST_CASE("diamond graph accumulates across both paths") {
  Rng rng(9);
  Tensor x = random_tensor({3}, rng);
  auto f = [&]() {
    Tensor a = mul(x, x);
    Tensor b = scale(x, 3.0);
    return sum(add(a, b));
  };
  auto rep = grad_check(f, {x});
  CHECK(rep.max_rel_error < 1e-4);
}

TEST_CASE("gradient accumulation doubles for f(x)+f(x)") {
  Rng rng(13);
  Tensor x = random_tensor({4}, rng);
  x.set_requires_grad(true);
  auto f = [&]() { return sum(mul(x, x)); };
  std::vector<double> single;
  {
    Tape tape;
    tape.backward(f());
    single = x.grad();
  }
  x.zero_grad();
  {
    Tape tape;
    tape.backward(add(f(), f()));
    for (size_t i = 0; i < single.size(); ++i)
      CHECK(x.grad()[i] == 2.0 * single[i]);
  }
}

TEST_CASE("backward contract errors") {
  Tensor x = Tensor::zeros({2, 2});
  x.set_requires_grad(true);
  Tape tape;
  Tensor y = mul(x, x);
  CHECK_THROWS_AS(tape.backward(y), Error);  // non-scalar
  Tape empty_tape;
  CHECK_THROWS_AS(empty_tape.backward(Tensor::scalar(1.0)), Error);
}

TEST_CASE("grad_check is near zero for linear functions") {
  Rng rng(21);
  Tensor x = random_tensor({6}, rng);
  auto f = [&]() { return sum(scale(x, 2.5)); };
  auto rep = grad_check(f, {x});
  CHECK(rep.max_rel_error < 1e-10);
}

TEST_CASE("grad_check passes composed softmax+matmul chain") {
  Rng rng(23);
  Tensor a = random_tensor({3, 4}, rng);
  Tensor b = random_tensor({4, 4}, rng);
  auto f = [&]() { return sum(mul(softmax_temp(matmul(a, b), 0.7),
                                  softmax_temp(a, 1.3))); };
  auto rep = grad_check(f, {a, b});
  CHECK(rep.max_rel_error < 1e-4);
}

TEST_CASE("grad_check detects a backward rule that is off by 2x") {
  Rng rng(25);
  Tensor x = random_tensor({5}, rng);
  // square with a deliberately doubled backward rule
  auto bad_square = [](const Tensor& a) {
    Tensor out = Tensor::zeros(a.shape());
    for (int64_t i = 0; i < a.numel(); ++i)
      out.data()[i] = a.at(i) * a.at(i);
    out.set_requires_grad(true);
    Tensor in = a;
    Tape::record([in, out]() mutable {
      if (!out.has_grad() || !in.requires_grad()) return;
      for (int64_t i = 0; i < in.numel(); ++i)
        in.grad()[i] += out.grad()[i] * 4.0 * in.at(i);  // should be 2x
    });
    return out;
  };
  auto f = [&]() { return sum(bad_square(x)); };
  auto rep = grad_check(f, {x});
  CHECK(rep.max_rel_error > 0.3);
}

TEST_CASE("per-op gradients vs finite differences over 10 seeds") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed * 977);
    Tensor a = random_tensor({3, 4}, rng);
    Tensor b = random_tensor({3, 4}, rng, 0.2, 2.0);  // positive for log
    Tensor v = random_tensor({3}, rng, 0.3, 2.0);
    Tensor gamma = random_tensor({4}, rng, 0.5, 1.5);
    Tensor beta = random_tensor({4}, rng);

    auto check = [&](const std::function<Tensor()>& f, std::vector<Tensor> in) {
      auto rep = grad_check(f, std::move(in));
      CAPTURE(seed);
      CHECK(rep.max_rel_error < 1e-4);
    };

    check([&]() { return sum(add(a, b)); }, {a, b});
    check([&]() { return sum(sub(a, b)); }, {a, b});
    check([&]() { return sum(mul(a, b)); }, {a, b});
    check([&]() { return sum(square(a)); }, {a});
    check([&]() { return sum(log(b)); }, {b});
    check([&]() { return sum(mul(relu(a), a)); }, {a});
    check([&]() { return sum(sigmoid(a)); }, {a});
    check([&]() { return sum(tanh(a)); }, {a});
    check([&]() { return mean(square(a)); }, {a});
    check([&]() { return sum(transpose(a)); }, {a});
    check([&]() { return sum(square(row_sums(a))); }, {a});
    check([&]() { return sum(rows_scaled(a, v)); }, {a, v});
    check([&]() { return sum(safe_reciprocal(v)); }, {v});
    check([&]() { return sum(square(concat({a, b}, 0))); }, {a, b});
    check([&]() { return sum(square(concat({a, b}, 1))); }, {a, b});
    check([&]() { return sum(square(slice_rows(a, 1, 3))); }, {a});
    check([&]() { return sum(square(slice_cols(a, 1, 4))); }, {a});
    check([&]() { return sum(square(layer_norm(a, gamma, beta))); },
          {a, gamma, beta});
    check([&]() { return sum(square(softmax_temp(a, 0.8))); }, {a});
    check([&]() {
      return sum(take_per_row(a, {1, 0, 3}));
    }, {a});
    check([&]() {
      return sum(square(embedding_lookup(a, {0, 2, 2, 1})));
    }, {a});
  }
}

TEST_CASE("straight_through forwards hard values and passes gradient") {
  Tensor p = Tensor::from({2}, {0.3, 0.7});
  p.set_requires_grad(true);
  Tape tape;
  Tensor z = straight_through(p, {0.0, 1.0});
  CHECK(z.at(0) == 0.0);
  CHECK(z.at(1) == 1.0);
  Tensor loss = sum(mul(z, Tensor::from({2}, {2.0, 5.0})));
  tape.backward(loss);
  CHECK(p.grad()[0] == 2.0);
  CHECK(p.grad()[1] == 5.0);
}

TEST_CASE("matrix_from_entries keeps unset positions at exact zero") {
  Tensor e1 = Tensor::scalar(2.5, true);
  Tensor e2 = Tensor::scalar(-1.0, true);
  Tape tape;
  Tensor m = matrix_from_entries(3, 3, {{0, 1, e1}, {1, 2, e2}});
  CHECK(m.at(0, 1) == 2.5);
  CHECK(m.at(1, 2) == -1.0);
  CHECK(m.at(2, 0) == 0.0);
  CHECK(m.at(0, 0) == 0.0);
  Tensor loss = sum(mul(m, m));
  tape.backward(loss);
  CHECK(e1.grad()[0] == doctest::Approx(5.0));
  CHECK(e2.grad()[0] == doctest::Approx(-2.0));
}

TEST_CASE("embedding_lookup rejects out-of-range ids") {
  Tensor table = Tensor::zeros({4, 2});
  CHECK_THROWS_AS(embedding_lookup(table, {0, 4}), Error);
  CHECK_THROWS_AS(embedding_lookup(table, {-1}), Error);
}

TEST_CASE("forward ops are deterministic") {
  Rng rng(31);
  Tensor a = random_tensor({5, 5}, rng);
  Tensor b = random_tensor({5, 5}, rng);
  Tensor r1 = matmul(softmax_temp(a, 0.5), sigmoid(b));
  Tensor r2 = matmul(softmax_temp(a, 0.5), sigmoid(b));
  for (int64_t i = 0; i < r1.numel(); ++i) CHECK(r1.at(i) == r2.at(i));
}

TEST_CASE("rng streams are reproducible and serializable") {
  Rng a = Rng::derive(42, {1, 2});
  Rng b = Rng::derive(42, {1, 2});
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng c = Rng::derive(42, {1, 3});
  CHECK(a.uniform() != c.uniform());

  Rng d(99);
  d.normal();
  const std::string s = d.state();
  Rng e(1);
  e.set_state(s);
  for (int i = 0; i < 10; ++i) CHECK(d.uniform() == e.uniform());
}
