#include "chronospike/temporal_encoder.hpp"

#include <cmath>

namespace chronospike {

PositionalEncoding PositionalEncoding::init(size_t t_max, size_t d, Rng& rng) {
  PositionalEncoding pe;
  pe.P = Tensor::rand_normal(t_max, d, 0.0, 0.02, rng);
  return pe;
}

TransformerBlockParams TransformerBlockParams::init(size_t dim, size_t heads, Rng& rng) {
  if (dim % heads != 0)
    throw std::runtime_error("transformer: dim must be divisible by head count");
  TransformerBlockParams p;
  p.dim = dim;
  p.heads = heads;
  p.ffn_dim = 2 * dim;
  p.W_q = Tensor::xavier_uniform(dim, dim, rng);
  p.W_k = Tensor::xavier_uniform(dim, dim, rng);
  p.W_v = Tensor::xavier_uniform(dim, dim, rng);
  p.W_o = Tensor::xavier_uniform(dim, dim, rng);
  p.ffn_W1 = Tensor::xavier_uniform(dim, p.ffn_dim, rng);
  p.ffn_b1 = Tensor::zeros(1, p.ffn_dim);
  p.ffn_W2 = Tensor::xavier_uniform(p.ffn_dim, dim, rng);
  p.ffn_b2 = Tensor::zeros(1, dim);
  p.ln_gamma = Tensor::full(1, dim, 1.0);
  p.ln_beta = Tensor::zeros(1, dim);
  return p;
}

TransformerVars register_transformer(Tape& tp, const TransformerBlockParams& p,
                                     const std::string& prefix) {
  TransformerVars v;
  v.W_q = tp.leaf(p.W_q, prefix + ".W_q");
  v.W_k = tp.leaf(p.W_k, prefix + ".W_k");
  v.W_v = tp.leaf(p.W_v, prefix + ".W_v");
  v.W_o = tp.leaf(p.W_o, prefix + ".W_o");
  v.ffn_W1 = tp.leaf(p.ffn_W1, prefix + ".ffn_W1");
  v.ffn_b1 = tp.leaf(p.ffn_b1, prefix + ".ffn_b1");
  v.ffn_W2 = tp.leaf(p.ffn_W2, prefix + ".ffn_W2");
  v.ffn_b2 = tp.leaf(p.ffn_b2, prefix + ".ffn_b2");
  v.ln_gamma = tp.leaf(p.ln_gamma, prefix + ".ln_gamma");
  v.ln_beta = tp.leaf(p.ln_beta, prefix + ".ln_beta");
  return v;
}

Var add_positional(Tape& tp, Var spike_seq, Var P_var) {
  const Tensor& x = tp.value(spike_seq);
  const Tensor& P = tp.value(P_var);
  if (x.rows() > P.rows())
    throw TapeError("add_positional: sequence length " + std::to_string(x.rows()) +
                    " exceeds T_max " + std::to_string(P.rows()));
  if (x.cols() != P.cols())
    throw TapeError("add_positional: dim mismatch " + x.shape_str() + " vs " +
                    P.shape_str());
  Var rows = tp.slice(P_var, 0, x.rows(), 0, x.cols());
  return tp.add(spike_seq, rows);
}

EncodeOut encode_sequence(Tape& tp, Var seq_with_pos, const TransformerBlockParams& p,
                          const TransformerVars& v, bool causal_mask) {
  const Tensor& x = tp.value(seq_with_pos);
  size_t T = x.rows();
  size_t dh = p.head_dim();
  double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

  Var Q = tp.matmul(seq_with_pos, v.W_q);
  Var K = tp.matmul(seq_with_pos, v.W_k);
  Var V = tp.matmul(seq_with_pos, v.W_v);

  Var mask{};
  if (causal_mask) {
    Tensor m(T, T);
    for (size_t i = 0; i < T; ++i)
      for (size_t j = i + 1; j < T; ++j) m.at(i, j) = -1e30;
    mask = tp.constant(m, "causal_mask");
  }

  EncodeOut out;
  std::vector<Var> heads;
  heads.reserve(p.heads);
  for (size_t h = 0; h < p.heads; ++h) {
    Var Qh = tp.slice(Q, 0, T, h * dh, (h + 1) * dh);
    Var Kh = tp.slice(K, 0, T, h * dh, (h + 1) * dh);
    Var Vh = tp.slice(V, 0, T, h * dh, (h + 1) * dh);
    Var scores = tp.scale(tp.matmul(Qh, tp.transpose_op(Kh)), inv_sqrt_dh);
    if (causal_mask) scores = tp.add(scores, mask);
    Var A = tp.softmax_lastdim(scores);
    out.attn_maps.push_back(tp.value(A));
    heads.push_back(tp.matmul(A, Vh));
  }
  Var attn = tp.matmul(tp.concat(heads, 1), v.W_o);
  Var res = tp.add(seq_with_pos, attn);
  Var normed = tp.layernorm(res, v.ln_gamma, v.ln_beta);
  Var hidden = tp.relu(tp.add(tp.matmul(normed, v.ffn_W1), v.ffn_b1));
  out.encoded = tp.add(tp.matmul(hidden, v.ffn_W2), v.ffn_b2);
  out.z = tp.slice(out.encoded, T - 1, T, 0, p.dim);
  return out;
}

}  // namespace chronospike
