#include <doctest.h>

#include <cmath>
#include <random>

#include "gtppo/netcore/grad_check.hpp"
#include "gtppo/netcore/ops.hpp"
#include "gtppo/netcore/optim.hpp"

using namespace gtppo::netcore;

namespace {

template <typename T = double>
BasicTensor<T> random_tensor(std::vector<int> shape, std::mt19937_64& rng, double scale = 1.0) {
  BasicTensor<T> t(std::move(shape));
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& v : t.values()) v = static_cast<T>(u(rng));
  return t;
}

BasicTensor<double> probe_weights(std::vector<int> shape, std::mt19937_64& rng) {
  return random_tensor(std::move(shape), rng, 1.0);
}

}  // namespace

TEST_CASE("linear matches hand-computed products") {
  Tape tape(false);
  SUBCASE("identity") {
    Var x = tape.constant(Tensor::from_rows({{1, 0}}));
    Var w = tape.constant(Tensor::from_rows({{1, 0}, {0, 1}}));
    Var b = tape.constant(Tensor({2}, {0, 0}));
    const auto& y = tape.value(linear(tape, x, w, b));
    CHECK(y.at(0, 0) == 1.0f);
    CHECK(y.at(0, 1) == 0.0f);
  }
  SUBCASE("zero input returns bias") {
    Var x = tape.constant(Tensor::from_rows({{0, 0}}));
    Var w = tape.constant(Tensor::from_rows({{5, -2}, {7, 9}}));
    Var b = tape.constant(Tensor({2}, {3, 4}));
    const auto& y = tape.value(linear(tape, x, w, b));
    CHECK(y.at(0, 0) == 3.0f);
    CHECK(y.at(0, 1) == 4.0f);
  }
  SUBCASE("general product") {
    Var x = tape.constant(Tensor::from_rows({{1, 2}}));
    Var w = tape.constant(Tensor::from_rows({{1, 1}, {1, -1}}));
    Var b = tape.constant(Tensor({2}, {0, 0}));
    const auto& y = tape.value(linear(tape, x, w, b));
    CHECK(y.at(0, 0) == 3.0f);
    CHECK(y.at(0, 1) == -1.0f);
  }
  SUBCASE("shape mismatch") {
    Var x = tape.constant(Tensor::from_rows({{1, 2, 3}}));
    Var w = tape.constant(Tensor::from_rows({{1, 1}, {1, -1}}));
    CHECK_THROWS_AS(linear(tape, x, w), gtppo::ConfigError);
  }
}

TEST_CASE("linear rows are batch invariant") {
  std::mt19937_64 rng(3);
  auto x = random_tensor<float>({7, 13}, rng);
  auto w = random_tensor<float>({13, 9}, rng);
  auto b = random_tensor<float>({9}, rng);
  Tape tape(false);
  const auto batched = tape.value(linear(tape, tape.constant(x), tape.constant(w), tape.constant(b)));
  for (int r = 0; r < 7; ++r) {
    Tensor row = Tensor::matrix(1, 13);
    std::copy(x.row(r).begin(), x.row(r).end(), row.row(0).begin());
    const auto single = tape.value(linear(tape, tape.constant(row), tape.constant(w), tape.constant(b)));
    for (int j = 0; j < 9; ++j) CHECK(single.at(0, j) == batched.at(r, j));
  }
}

TEST_CASE("layer_norm") {
  Tape tape(false);
  Var g = tape.constant(Tensor({3}, 1.0f));
  Var b = tape.constant(Tensor({3}, 0.0f));
  SUBCASE("constant row collapses to bias") {
    const auto& y = tape.value(layer_norm(tape, tape.constant(Tensor::from_rows({{2.5f, 2.5f, 2.5f}})), g, b));
    for (float v : y.values()) CHECK(v == 0.0f);
  }
  SUBCASE("hand mean and variance") {
    const auto& y = tape.value(layer_norm(tape, tape.constant(Tensor::from_rows({{1, 2, 3}})), g, b));
    // var = 2/3 -> (x - 2) / sqrt(2/3 + 1e-5)
    const double s = std::sqrt(2.0 / 3.0 + 1e-5);
    CHECK(y.at(0, 0) == doctest::Approx(-1.0 / s).epsilon(1e-6));
    CHECK(y.at(0, 1) == doctest::Approx(0.0));
    CHECK(y.at(0, 2) == doctest::Approx(1.0 / s).epsilon(1e-6));
    CHECK(y.at(0, 2) == doctest::Approx(1.2247).epsilon(1e-4));
  }
  SUBCASE("already normalized") {
    Var g2 = tape.constant(Tensor({2}, 1.0f));
    Var b2 = tape.constant(Tensor({2}, 0.0f));
    const auto& y = tape.value(layer_norm(tape, tape.constant(Tensor::from_rows({{1, -1}})), g2, b2, 1e-12f));
    CHECK(y.at(0, 0) == doctest::Approx(1.0));
    CHECK(y.at(0, 1) == doctest::Approx(-1.0));
  }
  SUBCASE("rows have zero mean and unit variance") {
    std::mt19937_64 rng(11);
    BasicTape<double> t(false);
    auto x = random_tensor({6, 16}, rng, 3.0);
    const auto& y = t.value(layer_norm(t, t.constant(x), t.constant(BasicTensor<double>({16}, 1.0)),
                                       t.constant(BasicTensor<double>({16}, 0.0)), 1e-5));
    for (int r = 0; r < 6; ++r) {
      double m = 0, v = 0;
      for (double e : y.row(r)) m += e;
      m /= 16;
      for (double e : y.row(r)) v += (e - m) * (e - m);
      v /= 16;
      CHECK(std::fabs(m) < 1e-5);
      CHECK(std::fabs(v - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("gate saturation and midpoint") {
  const int d = 4;
  Tape tape(false);
  Tensor xs = Tensor::from_rows({{0.3f, -1.2f, 2.0f, 0.7f}});
  Tensor ys = Tensor::from_rows({{-0.4f, 0.1f, 0.5f, 1.9f}});
  Var x = tape.constant(xs), y = tape.constant(ys);
  Var w = tape.constant(Tensor::matrix(2 * d, d));
  SUBCASE("positive bias keeps x") {
    const auto& o = tape.value(gate(tape, x, y, w, tape.constant(Tensor({d}, 20.0f))));
    for (int j = 0; j < d; ++j) CHECK(std::fabs(o[j] - xs[j]) < 1e-6);
  }
  SUBCASE("negative bias keeps y") {
    const auto& o = tape.value(gate(tape, x, y, w, tape.constant(Tensor({d}, -20.0f))));
    for (int j = 0; j < d; ++j) CHECK(std::fabs(o[j] - ys[j]) < 1e-6);
  }
  SUBCASE("zero bias averages") {
    const auto& o = tape.value(gate(tape, x, y, w, tape.constant(Tensor({d}, 0.0f))));
    for (int j = 0; j < d; ++j) CHECK(o[j] == 0.5f * xs[j] + 0.5f * ys[j]);
  }
}

TEST_CASE("gate with identity-favoring bias stays near x") {
  // The bound holds when the candidate y is no larger than x; with b_g = 5 the
  // residual weight is sigmoid(-5) ~ 0.0067.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 8;
    auto xs = random_tensor<float>({3, d}, rng, 2.0);
    auto ys = random_tensor<float>({3, d}, rng, 0.5);
    Tape tape(false);
    const auto& o = tape.value(gate(tape, tape.constant(xs), tape.constant(ys), tape.constant(Tensor::matrix(2 * d, d)),
                                    tape.constant(Tensor({d}, 5.0f))));
    float dev = 0, xmax = 0;
    for (std::size_t i = 0; i < o.size(); ++i) {
      dev = std::max(dev, std::fabs(o[i] - xs[i]));
      xmax = std::max(xmax, std::fabs(xs[i]));
    }
    CHECK(dev < 1e-2f * xmax);
  }
}

TEST_CASE("attention single token returns value projection") {
  std::mt19937_64 rng(7);
  const int d = 4;
  BasicTape<double> t(false);
  auto x = random_tensor({1, d}, rng);
  AttentionParams p{t.constant(random_tensor({d, d}, rng)), t.constant(random_tensor({d, d}, rng)),
                    t.constant(random_tensor({d, d}, rng)), t.constant(random_tensor({d, d}, rng)),
                    t.constant(BasicTensor<double>({d}, 0.0)), t.constant(random_tensor({3, d}, rng))};
  Var xv = t.constant(x);
  const auto out = t.value(multihead_attention_rel(t, xv, 2, p));
  const auto expect = t.value(linear(t, linear(t, xv, p.wv), p.wo, p.bo));
  for (int j = 0; j < d; ++j) CHECK(out[j] == doctest::Approx(expect[j]).epsilon(1e-12));
}

TEST_CASE("attention with zero keys is uniform over the causal prefix") {
  std::mt19937_64 rng(8);
  const int d = 6, len = 5;
  BasicTape<double> t(false);
  AttentionParams p{t.constant(random_tensor({d, d}, rng)), t.constant(BasicTensor<double>::matrix(d, d)),
                    t.constant(random_tensor({d, d}, rng)), t.constant(random_tensor({d, d}, rng)),
                    t.constant(BasicTensor<double>({d}, 0.0)), t.constant(BasicTensor<double>::matrix(len, d))};
  AttentionProbe<double> probe;
  multihead_attention_rel(t, t.constant(random_tensor({len, d}, rng)), 3, p, &probe);
  for (int h = 0; h < 3; ++h) {
    for (int i = 0; i < len; ++i) {
      const auto& w = probe.weights[h][i];
      REQUIRE(static_cast<int>(w.size()) == i + 1);
      for (double v : w) CHECK(v == doctest::Approx(1.0 / (i + 1)));
    }
  }
}

TEST_CASE("attention rows are normalized and future positions get zero weight") {
  std::mt19937_64 rng(9);
  const int d = 8, len = 7;
  BasicTape<double> t(false);
  AttentionParams p{t.constant(random_tensor({d, d}, rng)), t.constant(random_tensor({d, d}, rng)),
                    t.constant(random_tensor({d, d}, rng)), t.constant(random_tensor({d, d}, rng)),
                    t.constant(BasicTensor<double>({d}, 0.0)), t.constant(random_tensor({len, d}, rng))};
  AttentionProbe<double> probe;
  multihead_attention_rel(t, t.constant(random_tensor({len, d}, rng)), 2, p, &probe);
  for (const auto& head : probe.weights) {
    for (int i = 0; i < len; ++i) {
      double s = 0;
      for (double v : head[i]) s += v;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      // positions after i are never materialized: the dense row stops at i
      CHECK(static_cast<int>(head[i].size()) == i + 1);
    }
  }
}

TEST_CASE("attention shift invariance across absolute offsets") {
  std::mt19937_64 rng(12);
  const int d = 8, len = 6, span = 3;
  Tape t(false);
  auto x = random_tensor<float>({len, d}, rng);
  auto pad = random_tensor<float>({10, d}, rng);
  auto wq = random_tensor<float>({d, d}, rng), wk = random_tensor<float>({d, d}, rng);
  auto wv = random_tensor<float>({d, d}, rng), rel = random_tensor<float>({span + 1, d}, rng);
  // Window at absolute offset 0 vs the same window preceded by 10 unrelated
  // tokens. Queries far enough in (index >= span) see identical keys and
  // offsets, so their outputs must match bit for bit.
  Tensor both = Tensor::matrix(10 + len, d);
  for (int r = 0; r < 10; ++r) std::copy(pad.row(r).begin(), pad.row(r).end(), both.row(r).begin());
  for (int r = 0; r < len; ++r) std::copy(x.row(r).begin(), x.row(r).end(), both.row(10 + r).begin());
  auto run = [&](const Tensor& in) {
    Var xv = t.constant(in);
    Var q = linear(t, xv, t.constant(wq)), k = linear(t, xv, t.constant(wk)), v = linear(t, xv, t.constant(wv));
    return t.value(relative_attention(t, q, k, v, Var{}, Var{}, t.constant(rel), {{0, in.rows(), 0, 0}}, 2, span));
  };
  const auto a = run(x);
  const auto b = run(both);
  for (int i = span; i < len; ++i) {
    for (int j = 0; j < d; ++j) CHECK(a.at(i, j) == b.at(10 + i, j));
  }
}

TEST_CASE("gradients match central differences") {
  std::mt19937_64 rng(21);
  SUBCASE("linear") {
    auto wts = probe_weights({3, 3}, rng);
    auto r = grad_check(
        [&](BasicTape<double>& t, const std::vector<Var>& in) {
          return weighted_sum(t, linear(t, in[0], in[1], in[2]), wts);
        },
        {random_tensor({3, 3}, rng), random_tensor({3, 3}, rng), random_tensor({3}, rng)});
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("gate") {
    auto wts = probe_weights({3, 4}, rng);
    auto r = grad_check(
        [&](BasicTape<double>& t, const std::vector<Var>& in) {
          return weighted_sum(t, gate(t, in[0], in[1], in[2], in[3]), wts);
        },
        {random_tensor({3, 4}, rng), random_tensor({3, 4}, rng), random_tensor({8, 4}, rng), random_tensor({4}, rng)});
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("layer_norm") {
    auto wts = probe_weights({4, 5}, rng);
    auto r = grad_check(
        [&](BasicTape<double>& t, const std::vector<Var>& in) {
          return weighted_sum(t, layer_norm(t, in[0], in[1], in[2], 1e-5), wts);
        },
        {random_tensor({4, 5}, rng, 2.0), random_tensor({5}, rng), random_tensor({5}, rng)});
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("tanh and relu") {
    auto wts = probe_weights({3, 6}, rng);
    auto r = grad_check(
        [&](BasicTape<double>& t, const std::vector<Var>& in) {
          return weighted_sum(t, add(t, tanh(t, in[0]), relu(t, in[1])), wts);
        },
        {random_tensor({3, 6}, rng), random_tensor({3, 6}, rng)});
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("multihead attention with relative table") {
    const int d = 8, len = 5;
    auto wts = probe_weights({len, d}, rng);
    auto r = grad_check(
        [&](BasicTape<double>& t, const std::vector<Var>& in) {
          AttentionParams p{in[1], in[2], in[3], in[4], in[5], in[6]};
          return weighted_sum(t, multihead_attention_rel(t, in[0], 2, p), wts);
        },
        {random_tensor({len, d}, rng), random_tensor({d, d}, rng, 0.5), random_tensor({d, d}, rng, 0.5),
         random_tensor({d, d}, rng, 0.5), random_tensor({d, d}, rng, 0.5), random_tensor({d}, rng),
         random_tensor({3, d}, rng)});
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("attention with memory keys") {
    const int d = 4;
    auto wts = probe_weights({3, d}, rng);
    auto r = grad_check(
        [&](BasicTape<double>& t, const std::vector<Var>& in) {
          std::vector<AttentionSegment> segs{{0, 2, 0, 3}, {2, 1, 3, 3}};
          return weighted_sum(t, relative_attention(t, in[0], in[1], in[2], in[3], in[4], in[5], segs, 2, 3), wts);
        },
        {random_tensor({3, d}, rng), random_tensor({3, d}, rng), random_tensor({3, d}, rng),
         random_tensor({6, d}, rng), random_tensor({6, d}, rng), random_tensor({4, d}, rng)});
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("constant function has zero gradient") {
    auto r = grad_check(
        [&](BasicTape<double>& t, const std::vector<Var>&) { return t.constant(BasicTensor<double>({1}, 3.0)); },
        {random_tensor({2, 2}, rng)});
    CHECK(r.max_rel_error == 0.0);
  }
}

TEST_CASE("grad_check rejects eps outside its range") {
  auto fn = [](BasicTape<double>& t, const std::vector<Var>& in) { return sum(t, in[0]); };
  CHECK_THROWS_AS(grad_check(fn, {BasicTensor<double>({1}, 1.0)}, 1e-2), gtppo::ConfigError);
}

TEST_CASE("empty attention window is rejected") {
  Tape t(false);
  AttentionParams p{};
  CHECK_THROWS_AS(multihead_attention_rel(t, t.constant(Tensor::matrix(0, 4)), 2, p), gtppo::ConfigError);
}

TEST_CASE("adam moves parameters against the gradient") {
  ParameterStore store;
  store.add("w", Tensor({2}, {1.0f, -1.0f}));
  store.grad("w")[0] = 1.0f;
  store.grad("w")[1] = -1.0f;
  Adam opt;
  opt.step(store, 0.1);
  CHECK(store.value("w")[0] == doctest::Approx(0.9f));
  CHECK(store.value("w")[1] == doctest::Approx(-0.9f));
}
