#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chronospike/spatial_encoder.hpp"
#include "chronospike/temporal_encoder.hpp"

namespace chronospike {

struct ModelConfig {
  size_t input_dim = 0;
  size_t num_classes = 0;
  std::vector<size_t> hidden = {128, 64};
  size_t heads = 4;       // attention heads, spatial and temporal
  size_t t_max = 32;      // positional table length; independent of any dataset
  double alpha = 1.0;     // surrogate slope
  double lif_eps = 1e-3;
  bool sum_aggregation = false;  // GIN-style sum variant (WL witness)
  bool causal_mask = false;

  size_t embed_dim() const { return hidden.back(); }
  size_t num_layers() const { return hidden.size(); }
};

// Every trainable tensor in the model. The registry enumerates them in a
// fixed order shared by the optimizer and the checkpoint format.
struct ModelParams {
  ModelConfig config;
  std::vector<SpatialLayerParams> spatial;
  PositionalEncoding pos;
  TransformerBlockParams transformer;
  Tensor W_c;  // embed_dim x classes
  Tensor b_c;  // 1 x classes

  static ModelParams init(const ModelConfig& cfg, uint64_t seed);
  std::vector<std::pair<std::string, Tensor*>> registry();
  std::vector<std::pair<std::string, const Tensor*>> registry() const;
  size_t parameter_count() const;
};

// Appendix-style closed-form estimate: 4*K*d^2 + 2*d^2 + 2*d.
size_t formula_parameter_estimate(size_t num_layers, size_t d);

struct ParamVars {
  std::vector<SpatialLayerVars> spatial;
  Var pos;
  TransformerVars transformer;
  Var W_c, b_c;
};
ParamVars register_params(Tape& tp, const ModelParams& params);

// checkpoint = params + optimizer moments + best validation score
struct Checkpoint {
  ModelParams params;
  std::vector<Tensor> opt_m, opt_v;  // aligned with the registry; may be empty
  uint64_t opt_step = 0;
  double best_val_macro_f1 = 0.0;
  uint64_t best_epoch = 0;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace chronospike
