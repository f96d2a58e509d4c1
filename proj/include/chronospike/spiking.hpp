#pragma once

#include "chronospike/tape.hpp"

namespace chronospike {

// Adaptive LIF parameters, one (tau, V_th) pair per feature channel.
// tau is reparameterized as 0.5 + eps + softplus(tau_raw) so the stability
// condition tau > 1/2 holds at every gradient step.
struct LifParams {
  Tensor tau_raw;  // 1 x d
  Tensor v_th;     // 1 x d
  double u_reset = 0.0;
  double eps = 1e-3;
  SurrogateConfig surrogate;

  size_t dim() const { return tau_raw.cols(); }
  static LifParams init(size_t d, double tau_init = 1.0, double vth_init = 1.0,
                        double alpha = 1.0, double eps = 1e-3);
};

// scalar helpers shared by the tape path and the plain simulators
double effective_tau_scalar(double tau_raw, double eps = 1e-3);
double tau_raw_for(double tau_target, double eps = 1e-3);

struct LifScalarStep {
  double u_pre;   // membrane after integration, before reset
  double spike;   // 0 or 1
  double u_post;  // after reset
};
LifScalarStep lif_scalar_step(double u, double h, double tau, double v_th,
                              double u_reset);

// Membrane state for the active batch; zeroed at the start of every
// timestep block.
struct LifState {
  Tensor u;  // B x d
};
LifState reset_state(size_t batch_size, size_t d);

// tape-registered handles for one layer's LIF parameters
struct LifVars {
  Var tau_raw;
  Var v_th;
};
LifVars register_lif(Tape& tp, const LifParams& p, const std::string& prefix);

// effective tau as a recorded op chain (gradients flow into tau_raw)
Var effective_tau(Tape& tp, Var tau_raw, double eps = 1e-3);
// elementwise reciprocal via exp(-log(x)); valid for positive input
Var reciprocal(Tape& tp, Var x);

struct LifStepOut {
  Var spikes;
  Var u_pre;   // pre-reset membrane (what the analysis module histograms)
  Var u_post;  // carried state
};

// One Euler step: u' = u + (1/tau)(h - (u - u_reset)); s = 1[u' >= V_th];
// u'' = (1-s)u' + s*u_reset. Hard mode resets with the straight-through
// backward; soft mode composes the reset from smooth primitives so
// finite-difference checks see consistent gradients.
LifStepOut lif_step(Tape& tp, Var state_u, Var h, const LifVars& vars,
                    const LifParams& params, SpikeMode mode = SpikeMode::Hard);

}  // namespace chronospike
