#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "chronospike/tape.hpp"
#include "test_util.hpp"

using namespace chronospike;
using testutil::fd_gradcheck;
using testutil::rand_away_from_zero;

TEST_CASE("matmul identity and shape errors") {
  Tape tp;
  Var I = tp.leaf(Tensor::from_rows({{1, 0}, {0, 1}}));
  Var M = tp.leaf(Tensor::from_rows({{3, -1}, {2, 5}}));
  Var R = tp.matmul(I, M);
  CHECK(max_abs_diff(tp.value(R), tp.value(M)) == 0.0);

  Var bad = tp.leaf(Tensor::zeros(3, 3));
  CHECK_THROWS_WITH_AS(tp.matmul(M, bad), doctest::Contains("matmul"), TapeError);
}

TEST_CASE("softmax of a constant row is uniform") {
  Tape tp;
  Var x = tp.leaf(Tensor::row({0, 0, 0}));
  Var y = tp.softmax_lastdim(x);
  for (double v : tp.value(y).data) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("sum gradient matches finite differences tightly") {
  Rng rng(11);
  Tensor x = Tensor::rand_uniform(3, 4, -1, 1, rng);
  double err = fd_gradcheck(
      {x}, [](Tape& tp, const std::vector<Var>& in) { return tp.sum(in[0]); });
  CHECK(err < 1e-6);
}

TEST_CASE("backward of sum(W*x) matches the finite-difference oracle") {
  Rng rng(5);
  Tensor W = Tensor::rand_uniform(3, 4, -1, 1, rng);
  Tensor x = Tensor::rand_uniform(4, 2, -1, 1, rng);
  double err = fd_gradcheck({W}, [&x](Tape& tp, const std::vector<Var>& in) {
    Var xv = tp.constant(x);
    return tp.sum(tp.matmul(in[0], xv));
  });
  CHECK(err < 1e-6);

  // the gradient of sum(Wx) w.r.t. W is the outer product 1 * colsum(x)^T
  Tape tp;
  Var Wv = tp.leaf(W);
  Var xv = tp.constant(x);
  tp.backward(tp.sum(tp.matmul(Wv, xv)));
  Tensor g = tp.grad(Wv);
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = 0; j < 4; ++j) {
      double want = x.at(j, 0) + x.at(j, 1);
      CHECK(g.at(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("untouched leaves get exact zero gradients") {
  Tape tp;
  Var used = tp.leaf(Tensor::row({1, 2}));
  Var unused = tp.leaf(Tensor::row({5, 5, 5}));
  tp.backward(tp.sum(used));
  Tensor g = tp.grad(unused);
  for (double v : g.data) CHECK(v == 0.0);
}

TEST_CASE("backward twice without re-recording is an error") {
  Tape tp;
  Var x = tp.leaf(Tensor::row({1, 2}));
  Var loss = tp.sum(x);
  tp.backward(loss);
  CHECK_THROWS_AS(tp.backward(loss), TapeError);
}

TEST_CASE("ops recorded after the loss are ignored by backward") {
  Tape tp;
  Var x = tp.leaf(Tensor::row({1, 2, 3}));
  Var loss = tp.sum(x);
  Var after = tp.scale(x, 100.0);  // must not contribute
  (void)after;
  tp.backward(loss);
  Tensor g = tp.grad(x);
  for (double v : g.data) CHECK(v == 1.0);
}

TEST_CASE("non-finite outputs raise descriptive errors") {
  Tape tp;
  Var x = tp.leaf(Tensor::row({-1.0}));
  CHECK_THROWS_WITH_AS(tp.log_op(x), doctest::Contains("log"), TapeError);
}

TEST_CASE("loss must be scalar") {
  Tape tp;
  Var x = tp.leaf(Tensor::row({1, 2}));
  CHECK_THROWS_AS(tp.backward(x), TapeError);
}

TEST_CASE("hard spike forward is binary with inclusive threshold") {
  Tape tp;
  SurrogateConfig cfg{1.0};
  Var x = tp.leaf(Tensor::row({-0.5, 0.0, 0.5, 2.0, -2.0}));
  Var s = tp.spike(x, cfg, SpikeMode::Hard);
  const Tensor& v = tp.value(s);
  CHECK(v.data[0] == 0.0);
  CHECK(v.data[1] == 1.0);  // boundary fires
  CHECK(v.data[2] == 1.0);
  CHECK(v.data[3] == 1.0);
  CHECK(v.data[4] == 0.0);
  for (double d : v.data) CHECK((d == 0.0 || d == 1.0));
}

TEST_CASE("hard spike backward stores the fast-sigmoid surrogate exactly") {
  SurrogateConfig cfg{1.0};
  auto grad_at = [&](double x0) {
    Tape tp;
    Var x = tp.leaf(Tensor::row({x0}));
    Var s = tp.spike(x, cfg, SpikeMode::Hard);
    tp.backward(tp.sum(s));
    return tp.grad(x).data[0];
  };
  CHECK(grad_at(0.0) == 1.0);
  CHECK(grad_at(1.0) == 0.25);
  CHECK(grad_at(-1.0) == 0.25);
}

TEST_CASE("surrogate is even, peaks at alpha, decreases in |x|") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    CHECK(surrogate_grad(0.0, alpha) == alpha);
    double prev = surrogate_grad(0.0, alpha);
    for (double x = 0.25; x < 4.0; x += 0.25) {
      CHECK(surrogate_grad(x, alpha) == surrogate_grad(-x, alpha));
      CHECK(surrogate_grad(x, alpha) < prev);
      prev = surrogate_grad(x, alpha);
    }
  }
}

TEST_CASE("soft spike mode is a consistent forward/backward pair") {
  Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    Tensor x = rand_away_from_zero(2, 3, rng);
    double err = fd_gradcheck({x}, [](Tape& tp, const std::vector<Var>& in) {
      return tp.sum(tp.spike(in[0], SurrogateConfig{1.5}, SpikeMode::Soft));
    });
    CHECK(err < 1e-4);
  }
}

TEST_CASE("straight-through reset passes gradient to the membrane only") {
  Tape tp;
  Var u = tp.leaf(Tensor::row({0.4, 1.6}));
  Var s = tp.leaf(Tensor::row({0.0, 1.0}));
  Var r = tp.st_reset(u, s, 0.0);
  CHECK(tp.value(r).data[0] == 0.4);
  CHECK(tp.value(r).data[1] == 0.0);
  tp.backward(tp.sum(r));
  CHECK(tp.grad(u).data[0] == 1.0);
  CHECK(tp.grad(u).data[1] == 1.0);  // reset is transparent in backward
  CHECK(tp.grad(s).data[0] == 0.0);
  CHECK(tp.grad(s).data[1] == 0.0);
}

TEST_CASE("every smooth op passes finite-difference checks on random inputs") {
  struct Case {
    const char* name;
    std::function<double(Rng&)> run;
  };
  auto check_unary = [](Rng& rng, auto op, bool positive = false,
                        bool away_from_zero = false) {
    Tensor x = away_from_zero ? rand_away_from_zero(3, 4, rng)
               : positive    ? Tensor::rand_uniform(3, 4, 0.2, 2.0, rng)
                             : Tensor::rand_uniform(3, 4, -1.5, 1.5, rng);
    return fd_gradcheck({x}, [&op](Tape& tp, const std::vector<Var>& in) {
      return tp.mean(op(tp, in[0]));
    });
  };

  std::vector<Case> cases = {
      {"matmul",
       [](Rng& rng) {
         Tensor a = Tensor::rand_uniform(3, 4, -1, 1, rng);
         Tensor b = Tensor::rand_uniform(4, 2, -1, 1, rng);
         return fd_gradcheck({a, b}, [](Tape& tp, const std::vector<Var>& in) {
           return tp.sum(tp.matmul(in[0], in[1]));
         });
       }},
      {"add",
       [](Rng& rng) {
         Tensor a = Tensor::rand_uniform(3, 4, -1, 1, rng);
         Tensor b = Tensor::rand_uniform(3, 4, -1, 1, rng);
         return fd_gradcheck({a, b}, [](Tape& tp, const std::vector<Var>& in) {
           return tp.sum(tp.mul(tp.add(in[0], in[1]), tp.add(in[0], in[1])));
         });
       }},
      {"add row broadcast",
       [](Rng& rng) {
         Tensor a = Tensor::rand_uniform(3, 4, -1, 1, rng);
         Tensor b = Tensor::rand_uniform(1, 4, -1, 1, rng);
         return fd_gradcheck({a, b}, [](Tape& tp, const std::vector<Var>& in) {
           Var y = tp.add(in[0], in[1]);
           return tp.sum(tp.mul(y, y));
         });
       }},
      {"mul",
       [](Rng& rng) {
         Tensor a = Tensor::rand_uniform(3, 4, -1, 1, rng);
         Tensor b = Tensor::rand_uniform(3, 4, -1, 1, rng);
         return fd_gradcheck({a, b}, [](Tape& tp, const std::vector<Var>& in) {
           return tp.sum(tp.mul(in[0], in[1]));
         });
       }},
      {"mul row broadcast",
       [](Rng& rng) {
         Tensor a = Tensor::rand_uniform(1, 4, -1, 1, rng);
         Tensor b = Tensor::rand_uniform(3, 4, -1, 1, rng);
         return fd_gradcheck({a, b}, [](Tape& tp, const std::vector<Var>& in) {
           return tp.sum(tp.mul(in[0], in[1]));
         });
       }},
      {"scale",
       [&check_unary](Rng& rng) {
         return check_unary(rng,
                            [](Tape& tp, Var x) { return tp.scale(x, -2.5, 0.75); });
       }},
      {"concat axis0",
       [](Rng& rng) {
         Tensor a = Tensor::rand_uniform(2, 3, -1, 1, rng);
         Tensor b = Tensor::rand_uniform(1, 3, -1, 1, rng);
         return fd_gradcheck({a, b}, [](Tape& tp, const std::vector<Var>& in) {
           Var y = tp.concat({in[0], in[1]}, 0);
           return tp.sum(tp.mul(y, y));
         });
       }},
      {"concat axis1",
       [](Rng& rng) {
         Tensor a = Tensor::rand_uniform(2, 3, -1, 1, rng);
         Tensor b = Tensor::rand_uniform(2, 2, -1, 1, rng);
         return fd_gradcheck({a, b}, [](Tape& tp, const std::vector<Var>& in) {
           Var y = tp.concat({in[0], in[1]}, 1);
           return tp.sum(tp.mul(y, y));
         });
       }},
      {"slice",
       [&check_unary](Rng& rng) {
         return check_unary(rng, [](Tape& tp, Var x) { return tp.slice(x, 1, 3, 1, 4); });
       }},
      {"softmax_lastdim",
       [&check_unary](Rng& rng) {
         return check_unary(rng, [](Tape& tp, Var x) {
           Var y = tp.softmax_lastdim(x);
           return tp.mul(y, y);
         });
       }},
      {"layernorm",
       [](Rng& rng) {
         Tensor x = Tensor::rand_uniform(3, 4, -1, 1, rng);
         Tensor g = Tensor::rand_uniform(1, 4, 0.5, 1.5, rng);
         Tensor b = Tensor::rand_uniform(1, 4, -0.5, 0.5, rng);
         return fd_gradcheck({x, g, b}, [](Tape& tp, const std::vector<Var>& in) {
           Var y = tp.layernorm(in[0], in[1], in[2]);
           return tp.sum(tp.mul(y, y));
         });
       }},
      {"relu",
       [&check_unary](Rng& rng) {
         return check_unary(rng, [](Tape& tp, Var x) { return tp.relu(x); }, false, true);
       }},
      {"exp",
       [&check_unary](Rng& rng) {
         return check_unary(rng, [](Tape& tp, Var x) { return tp.exp_op(x); });
       }},
      {"log",
       [&check_unary](Rng& rng) {
         return check_unary(rng, [](Tape& tp, Var x) { return tp.log_op(x); }, true);
       }},
      {"sum",
       [&check_unary](Rng& rng) {
         return check_unary(rng, [](Tape& tp, Var x) { return tp.mul(x, x); });
       }},
      {"mean",
       [](Rng& rng) {
         Tensor x = Tensor::rand_uniform(3, 4, -1, 1, rng);
         return fd_gradcheck({x}, [](Tape& tp, const std::vector<Var>& in) {
           return tp.mean(tp.mul(in[0], in[0]));
         });
       }},
      {"l2_normalize",
       [&check_unary](Rng& rng) {
         return check_unary(rng, [](Tape& tp, Var x) { return tp.l2_normalize(x); },
                            false, true);
       }},
      {"dropout_mask_apply",
       [](Rng& rng) {
         Tensor x = Tensor::rand_uniform(3, 4, -1, 1, rng);
         Tensor mask(3, 4);
         for (double& m : mask.data) m = rng.uniform() < 0.5 ? 0.0 : 1.0;
         return fd_gradcheck({x}, [&mask](Tape& tp, const std::vector<Var>& in) {
           return tp.sum(tp.dropout_mask_apply(in[0], mask));
         });
       }},
      {"transpose",
       [&check_unary](Rng& rng) {
         return check_unary(rng, [](Tape& tp, Var x) {
           Var y = tp.transpose_op(x);
           return tp.mul(y, y);
         });
       }},
      {"gather_rows",
       [](Rng& rng) {
         Tensor x = Tensor::rand_uniform(4, 3, -1, 1, rng);
         return fd_gradcheck({x}, [](Tape& tp, const std::vector<Var>& in) {
           Var y = tp.gather_rows(in[0], {2, 0, 2, 3});
           return tp.sum(tp.mul(y, y));
         });
       }},
      {"spike soft",
       [&check_unary](Rng& rng) {
         return check_unary(
             rng,
             [](Tape& tp, Var x) {
               return tp.spike(x, SurrogateConfig{1.0}, SpikeMode::Soft);
             },
             false, true);
       }},
  };

  for (const Case& c : cases) {
    double worst = 0.0;
    for (uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(mix_seed(0xFDFD, seed));
      worst = std::max(worst, c.run(rng));
    }
    INFO("op: " << c.name);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("backward is deterministic bit for bit") {
  auto run = [] {
    Rng rng(77);
    Tape tp;
    Var a = tp.leaf(Tensor::rand_uniform(4, 4, -1, 1, rng));
    Var b = tp.leaf(Tensor::rand_uniform(4, 4, -1, 1, rng));
    Var y = tp.softmax_lastdim(tp.matmul(a, b));
    Var loss = tp.sum(tp.mul(y, tp.add(a, b)));
    tp.backward(loss);
    return std::make_pair(tp.grad(a), tp.grad(b));
  };
  auto [ga1, gb1] = run();
  auto [ga2, gb2] = run();
  CHECK(std::memcmp(ga1.data.data(), ga2.data.data(), ga1.data.size() * 8) == 0);
  CHECK(std::memcmp(gb1.data.data(), gb2.data.data(), gb1.data.size() * 8) == 0);
}

TEST_CASE("no-grad tape computes values but refuses backward") {
  Tape tp(false);
  Var x = tp.leaf(Tensor::row({1, 2, 3}));
  Var y = tp.scale(x, 2.0);
  CHECK(tp.value(y).data[2] == 6.0);
  CHECK_THROWS_AS(tp.backward(tp.sum(y)), TapeError);
}
