#pragma once

#include <vector>

#include "chronospike/spiking.hpp"
#include "chronospike/tape.hpp"

namespace chronospike {

// One attentive aggregation layer: per-head scaled dot-product attention
// over a sampled neighborhood on continuous features, self transform W_s,
// per-head neighbor transforms W_n^(h), and a square projection applied to
// the combined output before spike encoding.
struct SpatialLayerParams {
  size_t in_dim = 0;
  size_t out_dim = 0;
  size_t heads = 4;
  Tensor W_s;                   // in_dim x out_dim
  std::vector<Tensor> W_q;      // per head, in_dim x head_dim
  std::vector<Tensor> W_k;
  std::vector<Tensor> W_n;
  Tensor W_p;                   // out_dim x out_dim
  LifParams lif;

  size_t head_dim() const { return out_dim / heads; }
  static SpatialLayerParams init(size_t in_dim, size_t out_dim, size_t heads,
                                 double alpha, Rng& rng);
};

struct SpatialLayerVars {
  Var W_s;
  std::vector<Var> W_q, W_k, W_n;
  Var W_p;
  LifVars lif;
};
SpatialLayerVars register_spatial_layer(Tape& tp, const SpatialLayerParams& p,
                                        const std::string& prefix);

// Per-head attention weights over the sampled neighbors of one center.
// Each returned row is 1 x S and sums to one.
std::vector<Var> attention_weights(Tape& tp, Var center_feat, Var neighbor_feats,
                                   const SpatialLayerParams& p,
                                   const SpatialLayerVars& v);

// Eq-style combine: h_v = W_s x_v + concat_h( sum_u alpha_vu^(h) W_n^(h) x_u ).
// `sum_aggregation` swaps the attention weights for an unnormalized sum
// (the GIN-style injective variant used by the WL witness).
Var aggregate(Tape& tp, Var center_feat, Var neighbor_feats,
              const std::vector<Var>& head_weights, const SpatialLayerParams& p,
              const SpatialLayerVars& v);

struct SpatialForwardOut {
  Var spikes;  // rows x out_dim, binary in hard mode
  Var u_pre;   // pre-reset membrane, logged by the analysis module
};

// Full layer pass over a set of centers: aggregate -> square projection ->
// adaptive LIF from a zeroed per-timestep state -> optional spike dropout
// (pure mask-multiply; spikes stay binary).
SpatialForwardOut spatial_layer_forward(Tape& tp, const std::vector<Var>& center_feats,
                                        const std::vector<Var>& neighbor_feats,
                                        const SpatialLayerParams& p,
                                        const SpatialLayerVars& v, SpikeMode mode,
                                        bool training, double dropout_rate,
                                        bool sum_aggregation, Rng* dropout_rng);

}  // namespace chronospike
