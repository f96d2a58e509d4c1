#pragma once

#include <vector>

#include "chronospike/tape.hpp"

namespace chronospike {

// Learnable positional encodings, rows 1..T of a T_max x d table.
struct PositionalEncoding {
  Tensor P;  // t_max x d
  static PositionalEncoding init(size_t t_max, size_t d, Rng& rng);
};

// Single-block Transformer encoder parameters. Composition follows the
// printed formula FFN(LayerNorm(x + MultiHeadAttn(x))): one residual, one
// layer norm, no second residual around the FFN.
struct TransformerBlockParams {
  size_t dim = 0;
  size_t heads = 4;
  size_t ffn_dim = 0;  // 2 * dim
  Tensor W_q, W_k, W_v, W_o;  // dim x dim, heads use column blocks
  Tensor ffn_W1, ffn_b1;      // dim x ffn_dim, 1 x ffn_dim
  Tensor ffn_W2, ffn_b2;      // ffn_dim x dim, 1 x dim
  Tensor ln_gamma, ln_beta;   // 1 x dim

  size_t head_dim() const { return dim / heads; }
  static TransformerBlockParams init(size_t dim, size_t heads, Rng& rng);
};

struct TransformerVars {
  Var W_q, W_k, W_v, W_o;
  Var ffn_W1, ffn_b1, ffn_W2, ffn_b2;
  Var ln_gamma, ln_beta;
};
TransformerVars register_transformer(Tape& tp, const TransformerBlockParams& p,
                                     const std::string& prefix);

// spike_seq: T x d for one sample; P_var: registered t_max x d table.
// Errors when T exceeds the table.
Var add_positional(Tape& tp, Var spike_seq, Var P_var);

struct EncodeOut {
  Var z;                          // 1 x d, last-timestep readout
  Var encoded;                    // T x d full block output
  std::vector<Tensor> attn_maps;  // per head, T x T
};

EncodeOut encode_sequence(Tape& tp, Var seq_with_pos, const TransformerBlockParams& p,
                          const TransformerVars& v, bool causal_mask = false);

}  // namespace chronospike
