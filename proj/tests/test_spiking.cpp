#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chronospike/spiking.hpp"
#include "chronospike/stability_lab.hpp"
#include "test_util.hpp"

using namespace chronospike;

namespace {

struct TapeLif {
  Tape tp;
  LifParams params;
  LifVars vars;
  TapeLif(size_t d, double tau, double vth, double alpha = 1.0)
      : params(LifParams::init(d, tau, vth, alpha)) {
    vars = register_lif(tp, params, "lif");
  }
};

}  // namespace

TEST_CASE("subthreshold update with tau = 1 copies the input") {
  TapeLif f(1, 1.0, 1.0);
  Var u = f.tp.constant(Tensor::zeros(1, 1));
  Var h = f.tp.constant(Tensor::row({0.4}));
  LifStepOut out = lif_step(f.tp, u, h, f.vars, f.params);
  CHECK(f.tp.value(out.u_pre).data[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(f.tp.value(out.spikes).data[0] == 0.0);
  CHECK(f.tp.value(out.u_post).data[0] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("fire and reset at threshold crossing") {
  TapeLif f(1, 1.0, 1.0);
  Var u = f.tp.constant(Tensor::zeros(1, 1));
  Var h = f.tp.constant(Tensor::row({1.5}));
  LifStepOut out = lif_step(f.tp, u, h, f.vars, f.params);
  CHECK(f.tp.value(out.spikes).data[0] == 1.0);
  CHECK(f.tp.value(out.u_post).data[0] == 0.0);
}

TEST_CASE("constant subthreshold input converges to the fixed point") {
  // u* solves h - (u* - u_reset) = 0, so u* = h + u_reset
  double u = 0.0;
  for (int i = 0; i < 60; ++i) {
    LifScalarStep s = lif_scalar_step(u, 0.5, 2.0, 1.0, 0.0);
    u = s.u_post;
    CHECK(s.spike == 0.0);
  }
  CHECK(std::fabs(u - 0.5) < 1e-9);
}

TEST_CASE("geometric convergence toward the fixed point") {
  double tau = 3.0, h = 0.4, u_star = 0.4;
  double lambda = std::fabs(1.0 - 1.0 / tau);
  double u = -2.0;
  double gap0 = std::fabs(u - u_star);
  for (int t = 1; t <= 40; ++t) {
    u = lif_scalar_step(u, h, tau, 10.0, 0.0).u_post;
    CHECK(std::fabs(u - u_star) <= std::pow(lambda, t) * gap0 + 1e-12);
  }
}

TEST_CASE("reset_state gives zeros and is idempotent") {
  LifState s = reset_state(4, 8);
  CHECK(s.u.rows() == 4);
  CHECK(s.u.cols() == 8);
  for (double v : s.u.data) CHECK(v == 0.0);
  LifState s2 = reset_state(4, 8);
  CHECK(max_abs_diff(s.u, s2.u) == 0.0);

  // reset then a zero-input step stays at rest
  TapeLif f(8, 1.0, 1.0);
  Var u = f.tp.constant(s.u);
  Var h = f.tp.constant(Tensor::zeros(4, 8));
  LifStepOut out = lif_step(f.tp, u, h, f.vars, f.params);
  for (double v : f.tp.value(out.u_post).data) CHECK(v == 0.0);
  for (double v : f.tp.value(out.spikes).data) CHECK(v == 0.0);

  CHECK_THROWS(reset_state(0, 8));
}

TEST_CASE("effective tau initializes at 1.0 and stays above one half") {
  LifParams p = LifParams::init(16, 1.0, 1.0);
  for (double raw : p.tau_raw.data)
    CHECK(effective_tau_scalar(raw) == doctest::Approx(1.0).epsilon(1e-12));

  // limit of the positive map
  CHECK(effective_tau_scalar(-40.0) == doctest::Approx(0.5 + 1e-3).epsilon(1e-9));
  for (double raw = -8.0; raw < 8.0; raw += 0.37)
    CHECK(effective_tau_scalar(raw) > 0.5);
}

TEST_CASE("effective tau on the tape matches the scalar map and has positive slope") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    double raw = rng.uniform(-4.0, 4.0);
    Tape tp;
    Var x = tp.leaf(Tensor::row({raw}));
    Var tau = effective_tau(tp, x);
    CHECK(tp.value(tau).data[0] ==
          doctest::Approx(effective_tau_scalar(raw)).epsilon(1e-12));
    tp.backward(tp.sum(tau));
    double g = tp.grad(x).data[0];
    CHECK(g > 0.0);
    // finite-difference slope oracle
    double h = 1e-6;
    double fd = (effective_tau_scalar(raw + h) - effective_tau_scalar(raw - h)) / (2 * h);
    CHECK(g == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("decay factor magnitude stays below one for all effective taus") {
  Rng rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    double tau = effective_tau_scalar(rng.uniform(-30.0, 30.0));
    CHECK(std::fabs(1.0 - 1.0 / tau) < 1.0);
  }
}

TEST_CASE("non-finite values are rejected at the tape boundary") {
  Tape tp;
  Tensor bad(1, 2);
  bad.data[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(tp.constant(bad));
}

TEST_CASE("tape lif_step agrees with the scalar stepper") {
  Rng rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    double tau_target = rng.uniform(0.6, 4.0);
    LifParams p = LifParams::init(3, tau_target, 0.8);
    Tape tp;
    LifVars v = register_lif(tp, p, "lif");
    Tensor u0 = Tensor::rand_uniform(2, 3, -1, 1, rng);
    Tensor h0 = Tensor::rand_uniform(2, 3, -2, 2, rng);
    LifStepOut out = lif_step(tp, tp.constant(u0), tp.constant(h0), v, p);
    for (size_t i = 0; i < u0.numel(); ++i) {
      LifScalarStep s = lif_scalar_step(u0.data[i], h0.data[i], tau_target, 0.8, 0.0);
      CHECK(tp.value(out.u_pre).data[i] == doctest::Approx(s.u_pre).epsilon(1e-9));
      CHECK(tp.value(out.spikes).data[i] == s.spike);
      CHECK(tp.value(out.u_post).data[i] == doctest::Approx(s.u_post).epsilon(1e-9));
    }
  }
}

TEST_CASE("soft-mode lif_step is finite-difference consistent end to end") {
  Rng rng(13);
  Tensor u0 = Tensor::rand_uniform(2, 3, -0.8, 0.8, rng);
  Tensor h0 = Tensor::rand_uniform(2, 3, -1.0, 1.0, rng);
  LifParams p = LifParams::init(3, 1.3, 0.7, 2.0);
  std::vector<Tensor> inputs = {p.tau_raw, p.v_th, h0};
  double err = testutil::fd_gradcheck(
      inputs,
      [&](Tape& tp, const std::vector<Var>& in) {
        LifVars v{in[0], in[1]};
        LifStepOut out = lif_step(tp, tp.constant(u0), in[2], v, p, SpikeMode::Soft);
        Var both = tp.add(out.spikes, out.u_post);
        return tp.sum(tp.mul(both, both));
      },
      1e-6);
  CHECK(err < 1e-4);
}

TEST_CASE("membrane stays within the Theorem 1 bound over long random drives") {
  // subset of the acceptance grid, quick version
  for (double tau : {0.6, 1.0, 2.0}) {
    for (double M : {0.5, 2.0}) {
      BoundConfig cfg;
      cfg.tau = tau;
      cfg.v_th = 1.0;
      cfg.M = M;
      cfg.steps = 2000;
      cfg.seed = 42;
      BoundReport rep = simulate_bound(cfg);
      CHECK(rep.pass);
    }
  }
}
