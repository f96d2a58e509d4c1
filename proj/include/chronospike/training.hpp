#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "chronospike/analysis.hpp"
#include "chronospike/graph_store.hpp"
#include "chronospike/model.hpp"

namespace chronospike {

struct TrainConfig {
  double lr = 5e-3;
  size_t batch_size = 1024;
  size_t epochs = 100;
  double lambda_con = 0.1;   // contrastive weight
  double tau_con = 0.5;      // contrastive temperature
  double p_con = 0.1;        // view dropout
  double dropout = 0.7;      // inter-layer spike dropout
  double clip_norm = 1.0;
  double weight_decay = 1e-4;
  size_t patience = 10;
  double sampling_p = 0.3;   // hybrid sampling mixture
  std::vector<size_t> fanouts = {5, 2};
  std::vector<size_t> hidden = {128, 64};
  size_t heads = 4;
  size_t t_max = 32;
  double alpha = 1.0;
  uint64_t seed = 7;
  size_t infer_batch = 0;    // 0 = dataset-scale rule (10k above 1M nodes, 200k below)
  bool causal_mask = false;
  bool sum_aggregation = false;

  ModelConfig model_config(const SnapshotSequence& seq) const;
  void validate() const;
};

struct TrainError : std::runtime_error {
  explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// encoder forward (Algorithm 1)

struct EncoderOptions {
  bool training = false;
  SpikeMode mode = SpikeMode::Hard;
  uint64_t sample_nonce = 0;  // 0 in eval so sampling is batch-invariant
  Rng* dropout_rng = nullptr; // required when training
  SpikeLog* log = nullptr;
  bool want_attn = false;
};

struct EncoderOut {
  Var Z;  // B x embed_dim
  std::vector<std::vector<Tensor>> attn_maps;  // [sample][head] T x T
};

EncoderOut forward_encoder(Tape& tp, const std::vector<uint32_t>& batch,
                           const SnapshotSequence& seq, const ParamVars& pv,
                           const ModelParams& params, const TrainConfig& cfg,
                           const EncoderOptions& opt);

// ---------------------------------------------------------------------------
// heads and losses

Var classify(Tape& tp, Var Z, const ParamVars& pv);  // row-softmax probabilities
Var classification_loss(Tape& tp, Var probs, const std::vector<int>& labels);
Var contrastive_loss(Tape& tp, Var Z, double tau_con, double p_con, Rng& rng);
Var total_loss(Tape& tp, Var lcls, Var lcon, double lambda);

// ---------------------------------------------------------------------------
// metrics

double macro_f1(const std::vector<int>& pred, const std::vector<int>& gold,
                size_t num_classes);
double micro_f1(const std::vector<int>& pred, const std::vector<int>& gold,
                size_t num_classes);

// ---------------------------------------------------------------------------
// optimizer

// decoupled weight decay + adaptive moments, beta = (0.9, 0.999), eps 1e-8
class AdamW {
 public:
  AdamW() = default;
  void ensure_state(const std::vector<Tensor*>& params);
  void update(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
              double lr, double weight_decay);
  const std::vector<Tensor>& moments_m() const { return m_; }
  const std::vector<Tensor>& moments_v() const { return v_; }
  uint64_t step_count() const { return step_; }
  void restore(std::vector<Tensor> m, std::vector<Tensor> v, uint64_t step);

 private:
  std::vector<Tensor> m_, v_;
  uint64_t step_ = 0;
};

// scale all gradients so the global L2 norm is at most max_norm
double clip_global_norm(std::vector<Tensor>& grads, double max_norm);

struct EarlyStopper {
  double best = 0.0;
  size_t best_epoch = 0;
  size_t stale = 0;
  size_t patience = 10;
  // returns true when this epoch improved the best value
  bool observe(double val, size_t epoch);
  bool should_stop() const { return stale >= patience; }
};

// ---------------------------------------------------------------------------
// run records

struct EpochRecord {
  size_t epoch = 0;
  double train_loss_cls = 0.0;
  double train_loss_con = 0.0;
  double train_loss_total = 0.0;
  double val_macro_f1 = 0.0;
  double val_micro_f1 = 0.0;
  double best_val_macro_f1 = 0.0;
  size_t stale_epochs = 0;
  uint64_t forward_macs = 0;
};

struct RunReport {
  std::vector<EpochRecord> epochs;
  std::map<std::string, std::string> summary;  // deterministic key order
};

void write_report_tsv(const RunReport& report, const std::string& path);

struct TrainResult {
  Checkpoint checkpoint;
  RunReport report;
};

// Algorithm 2: mini-batch AdamW with surrogate gradients, global-norm
// clipping, validation Macro-F1 checkpointing and early stopping.
TrainResult train(const SnapshotSequence& seq, const TrainConfig& cfg,
                  std::ostream* log_stream = nullptr);

// Algorithm 3: deterministic batched argmax predictions for `nodes`.
std::vector<int> infer(const SnapshotSequence& seq, const ModelParams& params,
                       const TrainConfig& cfg, const std::vector<uint32_t>& nodes,
                       size_t batch_size = 0, SpikeLog* log = nullptr,
                       std::vector<std::vector<Tensor>>* attn_maps = nullptr);

}  // namespace chronospike
