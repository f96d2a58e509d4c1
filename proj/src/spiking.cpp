#include "chronospike/spiking.hpp"

#include <cmath>

namespace chronospike {

double effective_tau_scalar(double tau_raw, double eps) {
  // softplus with the usual overflow guard
  double sp = tau_raw > 30.0 ? tau_raw : std::log1p(std::exp(tau_raw));
  return 0.5 + eps + sp;
}

double tau_raw_for(double tau_target, double eps) {
  double sp = tau_target - 0.5 - eps;
  if (sp <= 0.0)
    throw std::runtime_error("tau_raw_for: target tau must exceed 0.5 + eps");
  // inverse softplus
  return std::log(std::expm1(sp));
}

LifParams LifParams::init(size_t d, double tau_init, double vth_init, double alpha,
                          double eps) {
  LifParams p;
  p.eps = eps;
  p.tau_raw = Tensor::full(1, d, tau_raw_for(tau_init, eps));
  p.v_th = Tensor::full(1, d, vth_init);
  p.surrogate.alpha = alpha;
  return p;
}

LifScalarStep lif_scalar_step(double u, double h, double tau, double v_th,
                              double u_reset) {
  LifScalarStep out;
  out.u_pre = u + (h - (u - u_reset)) / tau;
  out.spike = out.u_pre >= v_th ? 1.0 : 0.0;
  out.u_post = out.spike > 0.0 ? u_reset : out.u_pre;
  return out;
}

LifState reset_state(size_t batch_size, size_t d) {
  if (batch_size == 0 || d == 0)
    throw std::runtime_error("reset_state: sizes must be positive");
  return LifState{Tensor::zeros(batch_size, d)};
}

LifVars register_lif(Tape& tp, const LifParams& p, const std::string& prefix) {
  LifVars v;
  v.tau_raw = tp.leaf(p.tau_raw, prefix + ".tau_raw");
  v.v_th = tp.leaf(p.v_th, prefix + ".v_th");
  return v;
}

Var effective_tau(Tape& tp, Var tau_raw, double eps) {
  // 0.5 + eps + log(1 + exp(tau_raw))
  Var e = tp.exp_op(tau_raw);
  Var sp = tp.log_op(tp.scale(e, 1.0, 1.0));
  return tp.scale(sp, 1.0, 0.5 + eps);
}

Var reciprocal(Tape& tp, Var x) { return tp.exp_op(tp.scale(tp.log_op(x), -1.0)); }

LifStepOut lif_step(Tape& tp, Var state_u, Var h, const LifVars& vars,
                    const LifParams& params, SpikeMode mode) {
  if (!tp.value(h).all_finite())
    throw TapeError("lif_step: non-finite synaptic input");
  Var tau = effective_tau(tp, vars.tau_raw, params.eps);
  Var inv_tau = reciprocal(tp, tau);
  // h - (u - u_reset)
  Var drive = tp.add(h, tp.scale(state_u, -1.0, params.u_reset));
  Var u_pre = tp.add(state_u, tp.mul(inv_tau, drive));
  Var over = tp.add(u_pre, tp.scale(vars.v_th, -1.0));
  Var s = tp.spike(over, params.surrogate, mode);
  LifStepOut out;
  out.spikes = s;
  out.u_pre = u_pre;
  if (mode == SpikeMode::Hard) {
    out.u_post = tp.st_reset(u_pre, s, params.u_reset);
  } else {
    Var keep = tp.mul(tp.scale(s, -1.0, 1.0), u_pre);
    out.u_post = tp.add(keep, tp.scale(s, params.u_reset));
  }
  return out;
}

}  // namespace chronospike
