#include "chronospike/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace chronospike {

ModelConfig TrainConfig::model_config(const SnapshotSequence& seq) const {
  ModelConfig mc;
  mc.input_dim = seq.feature_dim;
  mc.num_classes = seq.num_classes();
  mc.hidden = hidden;
  mc.heads = heads;
  mc.t_max = t_max;
  mc.alpha = alpha;
  mc.sum_aggregation = sum_aggregation;
  mc.causal_mask = causal_mask;
  if (seq.num_steps > t_max)
    throw TrainError("t_max " + std::to_string(t_max) + " below sequence length " +
                     std::to_string(seq.num_steps));
  return mc;
}

void TrainConfig::validate() const {
  if (lr <= 0 || batch_size == 0 || epochs == 0 || tau_con <= 0 || clip_norm <= 0)
    throw TrainError("config: lr, batch_size, epochs, tau_con, clip_norm must be positive");
  if (lambda_con < 0 || weight_decay < 0) throw TrainError("config: negative weight");
  if (p_con < 0 || p_con >= 1 || dropout < 0 || dropout >= 1)
    throw TrainError("config: dropout rates must lie in [0,1)");
  if (sampling_p < 0 || sampling_p > 1) throw TrainError("config: sampling_p in [0,1]");
  if (fanouts.size() != hidden.size())
    throw TrainError("config: fanouts and hidden dims must agree in length");
  if (alpha <= 0) throw TrainError("config: alpha must be positive");
}

// ---------------------------------------------------------------------------
// encoder forward

namespace {

constexpr uint64_t kSamplerTag = 0x73616D70ULL;   // per-node sampling streams
constexpr uint64_t kValCarveTag = 0x76616CULL;

// center-row stride of level k in the flattened tree (product of (1+S_j) above it)
std::vector<size_t> level_strides(const std::vector<size_t>& fanouts) {
  size_t K = fanouts.size();
  std::vector<size_t> stride(K + 1, 1);
  for (size_t k = K; k-- > 0;) stride[k] = stride[k + 1] * (1 + fanouts[k]);
  return stride;
}

}  // namespace

EncoderOut forward_encoder(Tape& tp, const std::vector<uint32_t>& batch,
                           const SnapshotSequence& seq, const ParamVars& pv,
                           const ModelParams& params, const TrainConfig& cfg,
                           const EncoderOptions& opt) {
  if (batch.empty()) throw TrainError("forward_encoder: empty batch");
  for (uint32_t v : batch)
    if (v >= seq.num_nodes) throw TrainError("forward_encoder: node id out of range");
  if (opt.training && !opt.dropout_rng)
    throw TrainError("forward_encoder: training mode needs a dropout rng");

  const size_t B = batch.size();
  const size_t K = cfg.fanouts.size();
  const size_t T = seq.num_steps;
  const size_t d_k = params.config.embed_dim();
  auto strides = level_strides(cfg.fanouts);

  if (opt.log) {
    opt.log->layers.assign(K, {});
    for (size_t k = 0; k < K; ++k) {
      opt.log->layers[k].neurons = cfg.hidden[k];
      opt.log->layers[k].steps = T;
      opt.log->layers[k].spikes.assign(B, Tensor::zeros(T, cfg.hidden[k]));
      opt.log->layers[k].membranes.assign(B, Tensor::zeros(T, cfg.hidden[k]));
    }
  }

  CumulativeAdjacency cumulative(seq.num_nodes);
  std::vector<Var> step_spikes;  // per t, B x d_k
  step_spikes.reserve(T);

  for (size_t t = 0; t < T; ++t) {
    cumulative.advance_to(seq, t);
    NeighborSampler sampler(seq, t, cumulative);

    // level sets, flattened: level K = centers; level k-1 packs, per node of
    // level k, [self, its S_k samples]
    std::vector<std::vector<uint32_t>> level(K + 1);
    level[K] = batch;
    for (size_t k = K; k-- > 0;) {
      const std::vector<uint32_t>& upper = level[k + 1];
      size_t S = cfg.fanouts[k];
      std::vector<uint32_t>& cur = level[k];
      cur.reserve(upper.size() * (1 + S));
      for (uint32_t w : upper) {
        Rng node_rng(mix_seed(mix_seed(cfg.seed, kSamplerTag), opt.sample_nonce, t, k, w));
        NeighborSample ns = sampler.sample(w, S, cfg.sampling_p, node_rng);
        cur.push_back(w);
        cur.insert(cur.end(), ns.ids.begin(), ns.ids.end());
      }
    }

    Var X_t = tp.constant(seq.features[t], "X_t");
    std::vector<size_t> base_ids(level[0].begin(), level[0].end());
    Var H = tp.gather_rows(X_t, base_ids);  // level-0 features

    for (size_t k = 0; k < K; ++k) {
      const SpatialLayerParams& lp = params.spatial[k];
      const SpatialLayerVars& lv = pv.spatial[k];
      size_t S = cfg.fanouts[k];
      size_t n_active = level[k + 1].size();
      size_t block = 1 + S;
      std::vector<Var> centers, neighbors;
      centers.reserve(n_active);
      neighbors.reserve(n_active);
      size_t d_prev = tp.value(H).cols();
      for (size_t j = 0; j < n_active; ++j) {
        centers.push_back(tp.slice(H, j * block, j * block + 1, 0, d_prev));
        neighbors.push_back(tp.slice(H, j * block + 1, (j + 1) * block, 0, d_prev));
      }
      bool use_dropout = opt.training && (k + 1 < K) && cfg.dropout > 0.0;
      SpatialForwardOut fw = spatial_layer_forward(
          tp, centers, neighbors, lp, lv, opt.mode, opt.training,
          use_dropout ? cfg.dropout : 0.0, params.config.sum_aggregation,
          opt.dropout_rng);
      if (opt.log) {
        const Tensor& sv = tp.value(fw.spikes);
        const Tensor& uv = tp.value(fw.u_pre);
        size_t stride = strides[k + 1];
        for (size_t bi = 0; bi < B; ++bi)
          for (size_t j = 0; j < cfg.hidden[k]; ++j) {
            opt.log->layers[k].spikes[bi].at(t, j) = sv.at(bi * stride, j);
            opt.log->layers[k].membranes[bi].at(t, j) = uv.at(bi * stride, j);
          }
      }
      H = fw.spikes;
    }
    step_spikes.push_back(H);  // B x d_k
  }

  // stack per-sample sequences, add positional rows, run the temporal block
  EncoderOut out;
  if (opt.want_attn) out.attn_maps.resize(B);
  std::vector<Var> z_rows;
  z_rows.reserve(B);
  for (size_t bi = 0; bi < B; ++bi) {
    std::vector<Var> rows;
    rows.reserve(T);
    for (size_t t = 0; t < T; ++t)
      rows.push_back(tp.slice(step_spikes[t], bi, bi + 1, 0, d_k));
    Var seq_mat = rows.size() == 1 ? rows[0] : tp.concat(rows, 0);  // T x d_k
    Var with_pos = add_positional(tp, seq_mat, pv.pos);
    EncodeOut enc = encode_sequence(tp, with_pos, params.transformer, pv.transformer,
                                    params.config.causal_mask);
    if (opt.want_attn) out.attn_maps[bi] = std::move(enc.attn_maps);
    z_rows.push_back(enc.z);
  }
  out.Z = z_rows.size() == 1 ? z_rows[0] : tp.concat(z_rows, 0);
  return out;
}

// ---------------------------------------------------------------------------
// heads and losses

Var classify(Tape& tp, Var Z, const ParamVars& pv) {
  Var logits = tp.add(tp.matmul(Z, pv.W_c), pv.b_c);
  return tp.softmax_lastdim(logits);
}

Var classification_loss(Tape& tp, Var probs, const std::vector<int>& labels) {
  const Tensor& P = tp.value(probs);
  if (P.rows() != labels.size())
    throw TrainError("classification_loss: batch size mismatch");
  Tensor onehot(P.rows(), P.cols());
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<size_t>(labels[i]) >= P.cols())
      throw TrainError("classification_loss: label out of range");
    onehot.at(i, static_cast<size_t>(labels[i])) = 1.0;
  }
  Var mask = tp.constant(onehot, "label_onehot");
  Var ones = tp.constant(Tensor::full(P.cols(), 1, 1.0), "rowsum_ones");
  Var picked = tp.matmul(tp.mul(probs, mask), ones);  // B x 1, true-class probs
  return tp.scale(tp.sum(tp.log_op(picked)), -1.0 / static_cast<double>(P.rows()));
}

Var contrastive_loss(Tape& tp, Var Z, double tau_con, double p_con, Rng& rng) {
  const Tensor& Zv = tp.value(Z);
  size_t B = Zv.rows();
  Tensor m1(B, Zv.cols()), m2(B, Zv.cols());
  for (double& v : m1.data) v = rng.uniform() >= p_con ? 1.0 : 0.0;
  for (double& v : m2.data) v = rng.uniform() >= p_con ? 1.0 : 0.0;
  Var v1 = tp.l2_normalize(tp.dropout_mask_apply(Z, m1));
  Var v2 = tp.l2_normalize(tp.dropout_mask_apply(Z, m2));
  Var sim = tp.scale(tp.matmul(v1, tp.transpose_op(v2)), 1.0 / tau_con);
  Var logp = tp.log_op(tp.softmax_lastdim(sim));
  Tensor eye(B, B);
  for (size_t i = 0; i < B; ++i) eye.at(i, i) = 1.0;
  Var diag = tp.constant(eye, "con_diag");
  return tp.scale(tp.sum(tp.mul(logp, diag)), -1.0 / static_cast<double>(B));
}

Var total_loss(Tape& tp, Var lcls, Var lcon, double lambda) {
  return tp.add(lcls, tp.scale(lcon, lambda));
}

// ---------------------------------------------------------------------------
// metrics

namespace {

struct Confusion {
  std::vector<size_t> tp, fp, fn;
  explicit Confusion(size_t C) : tp(C, 0), fp(C, 0), fn(C, 0) {}
};

Confusion confusion(const std::vector<int>& pred, const std::vector<int>& gold,
                    size_t C) {
  if (pred.size() != gold.size())
    throw TrainError("metrics: prediction/label length mismatch");
  Confusion c(C);
  for (size_t i = 0; i < pred.size(); ++i) {
    int p = pred[i], g = gold[i];
    if (p < 0 || g < 0 || static_cast<size_t>(p) >= C || static_cast<size_t>(g) >= C)
      throw TrainError("metrics: class id out of range");
    if (p == g) {
      ++c.tp[p];
    } else {
      ++c.fp[p];
      ++c.fn[g];
    }
  }
  return c;
}

}  // namespace

double macro_f1(const std::vector<int>& pred, const std::vector<int>& gold,
                size_t num_classes) {
  Confusion c = confusion(pred, gold, num_classes);
  double total = 0.0;
  for (size_t k = 0; k < num_classes; ++k) {
    double denom = static_cast<double>(2 * c.tp[k] + c.fp[k] + c.fn[k]);
    total += denom > 0.0 ? 2.0 * static_cast<double>(c.tp[k]) / denom : 0.0;
  }
  return total / static_cast<double>(num_classes);
}

double micro_f1(const std::vector<int>& pred, const std::vector<int>& gold,
                size_t num_classes) {
  Confusion c = confusion(pred, gold, num_classes);
  size_t tp = 0, fp = 0, fn = 0;
  for (size_t k = 0; k < num_classes; ++k) {
    tp += c.tp[k];
    fp += c.fp[k];
    fn += c.fn[k];
  }
  double denom = static_cast<double>(2 * tp + fp + fn);
  return denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

// ---------------------------------------------------------------------------
// optimizer

void AdamW::ensure_state(const std::vector<Tensor*>& params) {
  if (!m_.empty()) return;
  for (const Tensor* p : params) {
    m_.push_back(Tensor::zeros(p->rows(), p->cols()));
    v_.push_back(Tensor::zeros(p->rows(), p->cols()));
  }
}

void AdamW::update(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                   double lr, double weight_decay) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ensure_state(params);
  if (grads.size() != params.size() || m_.size() != params.size())
    throw TrainError("adamw: parameter/gradient count mismatch");
  ++step_;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    for (size_t j = 0; j < p.data.size(); ++j) {
      m_[i].data[j] = beta1 * m_[i].data[j] + (1.0 - beta1) * g.data[j];
      v_[i].data[j] = beta2 * v_[i].data[j] + (1.0 - beta2) * g.data[j] * g.data[j];
      double mh = m_[i].data[j] / bc1;
      double vh = v_[i].data[j] / bc2;
      p.data[j] -= lr * weight_decay * p.data[j];  // decoupled decay
      p.data[j] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
}

void AdamW::restore(std::vector<Tensor> m, std::vector<Tensor> v, uint64_t step) {
  m_ = std::move(m);
  v_ = std::move(v);
  step_ = step;
}

double clip_global_norm(std::vector<Tensor>& grads, double max_norm) {
  double ss = 0.0;
  for (const Tensor& g : grads)
    for (double v : g.data) ss += v * v;
  double norm = std::sqrt(ss);
  if (norm > max_norm && norm > 0.0) {
    double s = max_norm / norm;
    for (Tensor& g : grads)
      for (double& v : g.data) v *= s;
  }
  return norm;
}

bool EarlyStopper::observe(double val, size_t epoch) {
  if (val > best) {
    best = val;
    best_epoch = epoch;
    stale = 0;
    return true;
  }
  ++stale;
  return false;
}

// ---------------------------------------------------------------------------
// train / infer

namespace {

std::vector<int> predict_batch(const SnapshotSequence& seq, const ModelParams& params,
                               const TrainConfig& cfg, const std::vector<uint32_t>& nodes,
                               SpikeLog* log, std::vector<std::vector<Tensor>>* attn) {
  Tape tp(false);  // eval: no gradient recording
  ParamVars pv = register_params(tp, params);
  EncoderOptions opt;
  opt.training = false;
  opt.sample_nonce = 0;
  opt.log = log;
  opt.want_attn = attn != nullptr;
  EncoderOut enc = forward_encoder(tp, nodes, seq, pv, params, cfg, opt);
  Var probs = classify(tp, enc.Z, pv);
  const Tensor& P = tp.value(probs);
  std::vector<int> preds(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    size_t arg = 0;
    for (size_t c = 1; c < P.cols(); ++c)
      if (P.at(i, c) > P.at(i, arg)) arg = c;
    preds[i] = static_cast<int>(arg);
  }
  if (attn)
    for (auto& maps : enc.attn_maps) attn->push_back(std::move(maps));
  return preds;
}

std::vector<int> labels_of(const SnapshotSequence& seq, const std::vector<uint32_t>& nodes) {
  std::vector<int> out;
  out.reserve(nodes.size());
  for (uint32_t v : nodes) out.push_back(seq.labels[v]);
  return out;
}

std::string batch_id_dump(const std::vector<uint32_t>& batch) {
  std::ostringstream os;
  for (size_t i = 0; i < batch.size(); ++i) {
    if (i) os << ',';
    os << batch[i];
    if (i >= 31) {
      os << ",...";
      break;
    }
  }
  return os.str();
}

}  // namespace

std::vector<int> infer(const SnapshotSequence& seq, const ModelParams& params,
                       const TrainConfig& cfg, const std::vector<uint32_t>& nodes,
                       size_t batch_size, SpikeLog* log,
                       std::vector<std::vector<Tensor>>* attn_maps) {
  if (batch_size == 0) batch_size = cfg.infer_batch;
  if (batch_size == 0) batch_size = seq.num_nodes > 1000000 ? 10000 : 200000;
  std::vector<int> preds;
  preds.reserve(nodes.size());
  SpikeLog chunk_log;
  for (size_t off = 0; off < nodes.size(); off += batch_size) {
    size_t end = std::min(nodes.size(), off + batch_size);
    std::vector<uint32_t> chunk(nodes.begin() + off, nodes.begin() + end);
    SpikeLog* lg = log ? &chunk_log : nullptr;
    std::vector<int> p = predict_batch(seq, params, cfg, chunk, lg, attn_maps);
    preds.insert(preds.end(), p.begin(), p.end());
    if (log) {
      if (log->layers.empty()) log->layers.assign(chunk_log.layers.size(), {});
      for (size_t l = 0; l < chunk_log.layers.size(); ++l) {
        log->layers[l].neurons = chunk_log.layers[l].neurons;
        log->layers[l].steps = chunk_log.layers[l].steps;
        for (auto& s : chunk_log.layers[l].spikes)
          log->layers[l].spikes.push_back(std::move(s));
        for (auto& m : chunk_log.layers[l].membranes)
          log->layers[l].membranes.push_back(std::move(m));
      }
      chunk_log.layers.clear();
    }
  }
  return preds;
}

TrainResult train(const SnapshotSequence& seq, const TrainConfig& cfg,
                  std::ostream* log_stream) {
  cfg.validate();
  ModelConfig mc = cfg.model_config(seq);
  ModelParams params = ModelParams::init(mc, cfg.seed);

  std::vector<uint32_t> train_nodes, val_nodes;
  for (uint32_t v : seq.nodes_in_split(Split::Train))
    if (seq.labels[v] >= 0) train_nodes.push_back(v);
  for (uint32_t v : seq.nodes_in_split(Split::Val))
    if (seq.labels[v] >= 0) val_nodes.push_back(v);
  if (train_nodes.empty()) throw TrainError("train: no labeled training nodes");
  if (val_nodes.empty()) {
    // carve a deterministic 10% of train for validation
    Rng carve(mix_seed(cfg.seed, kValCarveTag));
    std::vector<uint32_t> shuffled = train_nodes;
    carve.shuffle(shuffled);
    size_t n_val = std::max<size_t>(1, shuffled.size() / 10);
    val_nodes.assign(shuffled.begin(), shuffled.begin() + n_val);
    std::vector<uint32_t> rest(shuffled.begin() + n_val, shuffled.end());
    std::sort(rest.begin(), rest.end());
    train_nodes = std::move(rest);
    std::sort(val_nodes.begin(), val_nodes.end());
  }

  size_t C = mc.num_classes;
  AdamW opt;
  EarlyStopper stopper;
  stopper.patience = cfg.patience;
  Checkpoint best;
  best.params = params;
  RunReport report;
  Rng shuffle_rng(mix_seed(cfg.seed, 0x73687566ULL));

  for (size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng batch_rng(mix_seed(cfg.seed, 0x74726EULL, epoch));
    std::vector<uint32_t> order = train_nodes;
    shuffle_rng.shuffle(order);

    double sum_cls = 0.0, sum_con = 0.0, sum_total = 0.0;
    size_t seen = 0;
    uint64_t epoch_macs = 0;
    for (size_t off = 0; off < order.size(); off += cfg.batch_size) {
      size_t end = std::min(order.size(), off + cfg.batch_size);
      std::vector<uint32_t> batch(order.begin() + off, order.begin() + end);
      Tape tp(true);
      ParamVars pv = register_params(tp, params);
      auto reg = params.registry();
      try {
        EncoderOptions eopt;
        eopt.training = true;
        eopt.sample_nonce = epoch;
        eopt.dropout_rng = &batch_rng;
        EncoderOut enc = forward_encoder(tp, batch, seq, pv, params, cfg, eopt);
        Var probs = classify(tp, enc.Z, pv);
        Var lcls = classification_loss(tp, probs, labels_of(seq, batch));
        Var lcon = contrastive_loss(tp, enc.Z, cfg.tau_con, cfg.p_con, batch_rng);
        Var loss = total_loss(tp, lcls, lcon, cfg.lambda_con);
        tp.backward(loss);

        std::vector<Tensor*> param_ptrs;
        std::vector<Tensor> grads;
        param_ptrs.reserve(reg.size());
        grads.reserve(reg.size());
        size_t vi = 0;
        std::vector<Var> param_vars;
        for (const auto& lv : pv.spatial) {
          param_vars.push_back(lv.W_s);
          for (size_t h = 0; h < lv.W_q.size(); ++h) {
            param_vars.push_back(lv.W_q[h]);
            param_vars.push_back(lv.W_k[h]);
            param_vars.push_back(lv.W_n[h]);
          }
          param_vars.push_back(lv.W_p);
          param_vars.push_back(lv.lif.tau_raw);
          param_vars.push_back(lv.lif.v_th);
        }
        param_vars.push_back(pv.pos);
        param_vars.push_back(pv.transformer.W_q);
        param_vars.push_back(pv.transformer.W_k);
        param_vars.push_back(pv.transformer.W_v);
        param_vars.push_back(pv.transformer.W_o);
        param_vars.push_back(pv.transformer.ffn_W1);
        param_vars.push_back(pv.transformer.ffn_b1);
        param_vars.push_back(pv.transformer.ffn_W2);
        param_vars.push_back(pv.transformer.ffn_b2);
        param_vars.push_back(pv.transformer.ln_gamma);
        param_vars.push_back(pv.transformer.ln_beta);
        param_vars.push_back(pv.W_c);
        param_vars.push_back(pv.b_c);
        if (param_vars.size() != reg.size())
          throw TrainError("train: parameter registration order drifted");
        for (auto& [name, tensor] : reg) {
          param_ptrs.push_back(tensor);
          grads.push_back(tp.grad(param_vars[vi]));
          ++vi;
        }
        clip_global_norm(grads, cfg.clip_norm);
        opt.update(param_ptrs, grads, cfg.lr, cfg.weight_decay);

        double b = static_cast<double>(batch.size());
        sum_cls += tp.value(lcls).scalar_value() * b;
        sum_con += tp.value(lcon).scalar_value() * b;
        sum_total += tp.value(loss).scalar_value() * b;
        seen += batch.size();
        epoch_macs += tp.macs();
      } catch (const TapeError& e) {
        throw TrainError(std::string("non-finite loss aborted training: ") + e.what() +
                         "; offending batch nodes [" + batch_id_dump(batch) + "]");
      }
    }

    std::vector<int> val_pred = infer(seq, params, cfg, val_nodes, cfg.batch_size);
    std::vector<int> val_gold = labels_of(seq, val_nodes);
    double vmacro = macro_f1(val_pred, val_gold, C);
    double vmicro = micro_f1(val_pred, val_gold, C);

    bool improved = stopper.observe(vmacro, epoch);
    if (improved) {
      best.params = params;
      best.opt_m = opt.moments_m();
      best.opt_v = opt.moments_v();
      best.opt_step = opt.step_count();
      best.best_val_macro_f1 = vmacro;
      best.best_epoch = epoch;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss_cls = sum_cls / static_cast<double>(seen);
    rec.train_loss_con = sum_con / static_cast<double>(seen);
    rec.train_loss_total = sum_total / static_cast<double>(seen);
    rec.val_macro_f1 = vmacro;
    rec.val_micro_f1 = vmicro;
    rec.best_val_macro_f1 = stopper.best;
    rec.stale_epochs = stopper.stale;
    rec.forward_macs = epoch_macs;
    report.epochs.push_back(rec);
    if (log_stream)
      (*log_stream) << "epoch " << epoch << " loss " << rec.train_loss_total
                    << " val_macro_f1 " << vmacro << " best " << stopper.best << "\n";
    if (stopper.should_stop()) break;
  }

  report.summary["best_epoch"] = std::to_string(best.best_epoch);
  {
    std::ostringstream os;
    os.precision(17);
    os << best.best_val_macro_f1;
    report.summary["best_val_macro_f1"] = os.str();
  }
  report.summary["train_nodes"] = std::to_string(train_nodes.size());
  report.summary["val_nodes"] = std::to_string(val_nodes.size());
  report.summary["parameters"] = std::to_string(params.parameter_count());
  return TrainResult{std::move(best), std::move(report)};
}

void write_report_tsv(const RunReport& report, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw TrainError("cannot write " + path);
  f.precision(17);
  f << "record\tepoch\ttrain_loss_cls\ttrain_loss_con\ttrain_loss_total"
       "\tval_macro_f1\tval_micro_f1\tbest_val_macro_f1\tstale_epochs\tforward_macs\n";
  for (const EpochRecord& r : report.epochs)
    f << "epoch\t" << r.epoch << '\t' << r.train_loss_cls << '\t' << r.train_loss_con
      << '\t' << r.train_loss_total << '\t' << r.val_macro_f1 << '\t' << r.val_micro_f1
      << '\t' << r.best_val_macro_f1 << '\t' << r.stale_epochs << '\t' << r.forward_macs
      << '\n';
  for (const auto& [k, v] : report.summary) f << "summary\t" << k << '\t' << v << '\n';
}

}  // namespace chronospike
