#include "chronospike/datagen.hpp"

#include <algorithm>
#include <stdexcept>

namespace chronospike {

void GenConfig::validate() const {
  if (intra_prob < 0 || intra_prob > 1 || inter_prob < 0 || inter_prob > 1)
    throw std::runtime_error("datagen: edge probabilities must lie in [0,1]");
  if (num_classes < 2 || num_classes > num_nodes)
    throw std::runtime_error("datagen: need 2 <= classes <= nodes");
  if (num_steps == 0 || switch_step > num_steps)
    throw std::runtime_error("datagen: switch step beyond horizon");
  if (migrate_fraction < 0 || migrate_fraction > 1)
    throw std::runtime_error("datagen: migrate fraction in [0,1]");
  if (feature_noise < 0) throw std::runtime_error("datagen: negative noise");
  if (train_frac <= 0 || val_frac < 0 || train_frac + val_frac >= 1)
    throw std::runtime_error("datagen: bad split fractions");
}

SnapshotSequence generate(const GenConfig& cfg) {
  cfg.validate();
  size_t N = cfg.num_nodes, T = cfg.num_steps, C = cfg.num_classes;
  Rng rng(mix_seed(cfg.seed, 0x67656ECCULL));

  // initial communities: balanced round-robin, then shuffled
  std::vector<int> initial(N);
  for (size_t v = 0; v < N; ++v) initial[v] = static_cast<int>(v % C);
  rng.shuffle(initial);

  // a seeded subset migrates to a uniformly random other community
  std::vector<int> post = initial;
  std::vector<uint32_t> order(N);
  for (size_t v = 0; v < N; ++v) order[v] = static_cast<uint32_t>(v);
  rng.shuffle(order);
  size_t n_migrate = static_cast<size_t>(cfg.migrate_fraction * static_cast<double>(N));
  for (size_t i = 0; i < n_migrate; ++i) {
    uint32_t v = order[i];
    int dest = static_cast<int>(rng.uniform_int(C - 1));
    if (dest >= initial[v]) ++dest;
    post[v] = dest;
  }

  auto community_at = [&](uint32_t v, size_t t) {
    return t >= cfg.switch_step ? post[v] : initial[v];
  };

  SnapshotSequence seq;
  seq.num_nodes = N;
  seq.num_steps = T;
  seq.feature_dim = C;
  seq.edges.resize(T);
  seq.features.reserve(T);

  for (size_t t = 0; t < T; ++t) {
    auto& es = seq.edges[t];
    std::vector<size_t> degree(N, 0);
    for (uint32_t i = 0; i < N; ++i)
      for (uint32_t j = i + 1; j < N; ++j) {
        bool same = community_at(i, t) == community_at(j, t);
        double p = same ? cfg.intra_prob : cfg.inter_prob;
        if (rng.uniform() < p) {
          es.emplace_back(i, j);
          ++degree[i];
          ++degree[j];
        }
      }
    // rewire isolated nodes to a same-community peer
    for (uint32_t v = 0; v < N; ++v) {
      if (degree[v] > 0) continue;
      std::vector<uint32_t> peers;
      for (uint32_t u = 0; u < N; ++u)
        if (u != v && community_at(u, t) == community_at(v, t)) peers.push_back(u);
      if (peers.empty()) continue;  // singleton community, nothing to attach
      uint32_t u = peers[rng.uniform_int(peers.size())];
      es.emplace_back(std::min(u, v), std::max(u, v));
      ++degree[v];
      ++degree[u];
    }
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());

    double sigma = t >= cfg.switch_step ? cfg.feature_noise : 0.15 * cfg.feature_noise;
    Tensor X(N, C);
    for (uint32_t v = 0; v < N; ++v)
      for (size_t j = 0; j < C; ++j) {
        double onehot = static_cast<size_t>(community_at(v, t)) == j ? 1.0 : 0.0;
        X.at(v, j) = onehot + sigma * rng.normal();
      }
    seq.features.push_back(std::move(X));
  }

  seq.labels.assign(N, -1);
  for (uint32_t v = 0; v < N; ++v) seq.labels[v] = post[v];

  std::vector<uint32_t> split_order(N);
  for (size_t v = 0; v < N; ++v) split_order[v] = static_cast<uint32_t>(v);
  rng.shuffle(split_order);
  size_t n_train = static_cast<size_t>(cfg.train_frac * static_cast<double>(N));
  size_t n_val = static_cast<size_t>(cfg.val_frac * static_cast<double>(N));
  seq.splits.assign(N, Split::None);
  for (size_t i = 0; i < N; ++i) {
    Split s = i < n_train                ? Split::Train
              : i < n_train + n_val      ? Split::Val
                                         : Split::Test;
    seq.splits[split_order[i]] = s;
  }
  seq.validate();
  return seq;
}

}  // namespace chronospike
