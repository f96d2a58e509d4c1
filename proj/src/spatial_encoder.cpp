#include "chronospike/spatial_encoder.hpp"

#include <cmath>

namespace chronospike {

SpatialLayerParams SpatialLayerParams::init(size_t in_dim, size_t out_dim, size_t heads,
                                            double alpha, Rng& rng) {
  if (out_dim % heads != 0)
    throw std::runtime_error("spatial layer: out_dim must be divisible by head count");
  SpatialLayerParams p;
  p.in_dim = in_dim;
  p.out_dim = out_dim;
  p.heads = heads;
  size_t dh = out_dim / heads;
  p.W_s = Tensor::xavier_uniform(in_dim, out_dim, rng);
  for (size_t h = 0; h < heads; ++h) {
    p.W_q.push_back(Tensor::xavier_uniform(in_dim, dh, rng));
    p.W_k.push_back(Tensor::xavier_uniform(in_dim, dh, rng));
    p.W_n.push_back(Tensor::xavier_uniform(in_dim, dh, rng));
  }
  p.W_p = Tensor::xavier_uniform(out_dim, out_dim, rng);
  p.lif = LifParams::init(out_dim, 1.0, 1.0, alpha);
  return p;
}

SpatialLayerVars register_spatial_layer(Tape& tp, const SpatialLayerParams& p,
                                        const std::string& prefix) {
  SpatialLayerVars v;
  v.W_s = tp.leaf(p.W_s, prefix + ".W_s");
  for (size_t h = 0; h < p.heads; ++h) {
    std::string hh = prefix + ".h" + std::to_string(h);
    v.W_q.push_back(tp.leaf(p.W_q[h], hh + ".W_q"));
    v.W_k.push_back(tp.leaf(p.W_k[h], hh + ".W_k"));
    v.W_n.push_back(tp.leaf(p.W_n[h], hh + ".W_n"));
  }
  v.W_p = tp.leaf(p.W_p, prefix + ".W_p");
  v.lif = register_lif(tp, p.lif, prefix + ".lif");
  return v;
}

std::vector<Var> attention_weights(Tape& tp, Var center_feat, Var neighbor_feats,
                                   const SpatialLayerParams& p,
                                   const SpatialLayerVars& v) {
  if (tp.value(neighbor_feats).rows() == 0)
    throw TapeError("attention_weights: need at least one neighbor");
  double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(p.head_dim()));
  std::vector<Var> weights;
  weights.reserve(p.heads);
  for (size_t h = 0; h < p.heads; ++h) {
    Var q = tp.matmul(center_feat, v.W_q[h]);              // 1 x dh
    Var k = tp.matmul(neighbor_feats, v.W_k[h]);           // S x dh
    Var scores = tp.scale(tp.matmul(q, tp.transpose_op(k)), inv_sqrt_dh);  // 1 x S
    weights.push_back(tp.softmax_lastdim(scores));
  }
  return weights;
}

Var aggregate(Tape& tp, Var center_feat, Var neighbor_feats,
              const std::vector<Var>& head_weights, const SpatialLayerParams& p,
              const SpatialLayerVars& v) {
  std::vector<Var> head_outs;
  head_outs.reserve(p.heads);
  for (size_t h = 0; h < p.heads; ++h) {
    Var vals = tp.matmul(neighbor_feats, v.W_n[h]);        // S x dh
    head_outs.push_back(tp.matmul(head_weights[h], vals)); // 1 x dh
  }
  Var neigh = tp.concat(head_outs, 1);                     // 1 x out_dim
  Var self = tp.matmul(center_feat, v.W_s);                // 1 x out_dim
  return tp.add(self, neigh);
}

SpatialForwardOut spatial_layer_forward(Tape& tp, const std::vector<Var>& center_feats,
                                        const std::vector<Var>& neighbor_feats,
                                        const SpatialLayerParams& p,
                                        const SpatialLayerVars& v, SpikeMode mode,
                                        bool training, double dropout_rate,
                                        bool sum_aggregation, Rng* dropout_rng) {
  if (center_feats.size() != neighbor_feats.size())
    throw TapeError("spatial_layer_forward: centers and neighbor sets differ in count");
  std::vector<Var> rows;
  rows.reserve(center_feats.size());
  for (size_t i = 0; i < center_feats.size(); ++i) {
    std::vector<Var> alpha;
    if (sum_aggregation) {
      size_t s = tp.value(neighbor_feats[i]).rows();
      alpha.assign(p.heads, tp.constant(Tensor::full(1, s, 1.0), "sum_weights"));
    } else {
      alpha = attention_weights(tp, center_feats[i], neighbor_feats[i], p, v);
    }
    rows.push_back(aggregate(tp, center_feats[i], neighbor_feats[i], alpha, p, v));
  }
  Var agg = rows.size() == 1 ? rows[0] : tp.concat(rows, 0);
  Var pre = tp.matmul(agg, v.W_p);
  LifState state = reset_state(tp.value(pre).rows(), p.out_dim);
  Var state_var = tp.constant(state.u, "lif_state0");
  LifStepOut lif = lif_step(tp, state_var, pre, v.lif, p.lif, mode);

  SpatialForwardOut out;
  out.u_pre = lif.u_pre;
  out.spikes = lif.spikes;
  if (training && dropout_rate > 0.0) {
    if (!dropout_rng)
      throw TapeError("spatial_layer_forward: training dropout needs an rng");
    const Tensor& sv = tp.value(out.spikes);
    Tensor mask(sv.rows(), sv.cols());
    for (double& m : mask.data) m = dropout_rng->uniform() >= dropout_rate ? 1.0 : 0.0;
    out.spikes = tp.dropout_mask_apply(out.spikes, mask);
  }
  return out;
}

}  // namespace chronospike
