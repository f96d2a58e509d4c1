#include "chronospike/model.hpp"

#include <cstring>
#include <fstream>

namespace chronospike {

ModelParams ModelParams::init(const ModelConfig& cfg, uint64_t seed) {
  if (cfg.input_dim == 0 || cfg.num_classes == 0)
    throw std::runtime_error("model init: input_dim and num_classes must be set");
  if (cfg.hidden.empty()) throw std::runtime_error("model init: need hidden dims");
  ModelParams p;
  p.config = cfg;
  Rng rng(mix_seed(seed, 0x6D6F64656CULL));  // one stream, registry order
  size_t prev = cfg.input_dim;
  for (size_t k = 0; k < cfg.hidden.size(); ++k) {
    auto layer = SpatialLayerParams::init(prev, cfg.hidden[k], cfg.heads, cfg.alpha, rng);
    layer.lif.eps = cfg.lif_eps;
    p.spatial.push_back(std::move(layer));
    prev = cfg.hidden[k];
  }
  p.pos = PositionalEncoding::init(cfg.t_max, cfg.embed_dim(), rng);
  p.transformer = TransformerBlockParams::init(cfg.embed_dim(), cfg.heads, rng);
  p.W_c = Tensor::xavier_uniform(cfg.embed_dim(), cfg.num_classes, rng);
  p.b_c = Tensor::zeros(1, cfg.num_classes);
  return p;
}

namespace {

template <typename Self, typename Entry>
std::vector<Entry> build_registry(Self& self) {
  std::vector<Entry> out;
  for (size_t k = 0; k < self.spatial.size(); ++k) {
    auto& layer = self.spatial[k];
    std::string pre = "spatial." + std::to_string(k);
    out.emplace_back(pre + ".W_s", &layer.W_s);
    for (size_t h = 0; h < layer.heads; ++h) {
      std::string hh = pre + ".h" + std::to_string(h);
      out.emplace_back(hh + ".W_q", &layer.W_q[h]);
      out.emplace_back(hh + ".W_k", &layer.W_k[h]);
      out.emplace_back(hh + ".W_n", &layer.W_n[h]);
    }
    out.emplace_back(pre + ".W_p", &layer.W_p);
    out.emplace_back(pre + ".lif.tau_raw", &layer.lif.tau_raw);
    out.emplace_back(pre + ".lif.v_th", &layer.lif.v_th);
  }
  out.emplace_back("pos.P", &self.pos.P);
  auto& tr = self.transformer;
  out.emplace_back("temporal.W_q", &tr.W_q);
  out.emplace_back("temporal.W_k", &tr.W_k);
  out.emplace_back("temporal.W_v", &tr.W_v);
  out.emplace_back("temporal.W_o", &tr.W_o);
  out.emplace_back("temporal.ffn_W1", &tr.ffn_W1);
  out.emplace_back("temporal.ffn_b1", &tr.ffn_b1);
  out.emplace_back("temporal.ffn_W2", &tr.ffn_W2);
  out.emplace_back("temporal.ffn_b2", &tr.ffn_b2);
  out.emplace_back("temporal.ln_gamma", &tr.ln_gamma);
  out.emplace_back("temporal.ln_beta", &tr.ln_beta);
  out.emplace_back("classifier.W_c", &self.W_c);
  out.emplace_back("classifier.b_c", &self.b_c);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> ModelParams::registry() {
  return build_registry<ModelParams, std::pair<std::string, Tensor*>>(*this);
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::registry() const {
  return build_registry<const ModelParams, std::pair<std::string, const Tensor*>>(*this);
}

size_t ModelParams::parameter_count() const {
  size_t n = 0;
  for (const auto& [name, t] : registry()) n += t->numel();
  return n;
}

size_t formula_parameter_estimate(size_t num_layers, size_t d) {
  return 4 * num_layers * d * d + 2 * d * d + 2 * d;
}

ParamVars register_params(Tape& tp, const ModelParams& params) {
  ParamVars pv;
  for (size_t k = 0; k < params.spatial.size(); ++k)
    pv.spatial.push_back(
        register_spatial_layer(tp, params.spatial[k], "spatial." + std::to_string(k)));
  pv.pos = tp.leaf(params.pos.P, "pos.P");
  pv.transformer = register_transformer(tp, params.transformer, "temporal");
  pv.W_c = tp.leaf(params.W_c, "classifier.W_c");
  pv.b_c = tp.leaf(params.b_c, "classifier.b_c");
  return pv;
}

// ---------------------------------------------------------------------------
// checkpoint io: little-endian binary, raw doubles, versioned header

namespace {

constexpr uint32_t kMagic = 0x4B505343;  // "CSPK"
constexpr uint32_t kVersion = 1;

void put_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

uint64_t get_u64(std::istream& is) {
  uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
uint32_t get_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
double get_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void put_string(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string get_string(std::istream& is) {
  uint64_t n = get_u64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}

void put_tensor(std::ostream& os, const Tensor& t) {
  put_u64(os, t.rows());
  put_u64(os, t.cols());
  os.write(reinterpret_cast<const char*>(t.data.data()),
           static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}
Tensor get_tensor(std::istream& is) {
  uint64_t r = get_u64(is);
  uint64_t c = get_u64(is);
  Tensor t(r, c);
  is.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  return t;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path);
  put_u32(os, kMagic);
  put_u32(os, kVersion);
  const ModelConfig& c = ck.params.config;
  put_u64(os, c.input_dim);
  put_u64(os, c.num_classes);
  put_u64(os, c.hidden.size());
  for (size_t h : c.hidden) put_u64(os, h);
  put_u64(os, c.heads);
  put_u64(os, c.t_max);
  put_f64(os, c.alpha);
  put_f64(os, c.lif_eps);
  put_u32(os, (c.sum_aggregation ? 1u : 0u) | (c.causal_mask ? 2u : 0u));

  auto reg = ck.params.registry();
  put_u64(os, reg.size());
  for (const auto& [name, t] : reg) {
    put_string(os, name);
    put_tensor(os, *t);
  }
  put_u32(os, ck.opt_m.empty() ? 0u : 1u);
  if (!ck.opt_m.empty()) {
    if (ck.opt_m.size() != reg.size() || ck.opt_v.size() != reg.size())
      throw std::runtime_error("checkpoint: optimizer moment count mismatch");
    for (const Tensor& t : ck.opt_m) put_tensor(os, t);
    for (const Tensor& t : ck.opt_v) put_tensor(os, t);
    put_u64(os, ck.opt_step);
  }
  put_f64(os, ck.best_val_macro_f1);
  put_u64(os, ck.best_epoch);
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path);
  if (get_u32(is) != kMagic) throw std::runtime_error("bad checkpoint magic in " + path);
  uint32_t ver = get_u32(is);
  if (ver != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(ver));
  ModelConfig c;
  c.input_dim = get_u64(is);
  c.num_classes = get_u64(is);
  c.hidden.resize(get_u64(is));
  for (size_t& h : c.hidden) h = get_u64(is);
  c.heads = get_u64(is);
  c.t_max = get_u64(is);
  c.alpha = get_f64(is);
  c.lif_eps = get_f64(is);
  uint32_t flags = get_u32(is);
  c.sum_aggregation = flags & 1u;
  c.causal_mask = flags & 2u;

  Checkpoint ck;
  ck.params = ModelParams::init(c, 0);
  auto reg = ck.params.registry();
  uint64_t n = get_u64(is);
  if (n != reg.size())
    throw std::runtime_error("checkpoint tensor count mismatch in " + path);
  for (auto& [name, t] : reg) {
    std::string got = get_string(is);
    if (got != name)
      throw std::runtime_error("checkpoint tensor order mismatch: expected " + name +
                               ", got " + got);
    Tensor loaded = get_tensor(is);
    if (!loaded.same_shape(*t))
      throw std::runtime_error("checkpoint tensor shape mismatch for " + name);
    *t = std::move(loaded);
  }
  if (get_u32(is) != 0) {
    ck.opt_m.reserve(reg.size());
    ck.opt_v.reserve(reg.size());
    for (size_t i = 0; i < reg.size(); ++i) ck.opt_m.push_back(get_tensor(is));
    for (size_t i = 0; i < reg.size(); ++i) ck.opt_v.push_back(get_tensor(is));
    ck.opt_step = get_u64(is);
  }
  ck.best_val_macro_f1 = get_f64(is);
  ck.best_epoch = get_u64(is);
  if (!is) throw std::runtime_error("truncated checkpoint " + path);
  return ck;
}

}  // namespace chronospike
