#include "chronospike/stability_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "chronospike/spiking.hpp"

namespace chronospike {

// ---------------------------------------------------------------------------
// Theorem 1

double membrane_bound(double tau, double v_th, double M, double u_reset) {
  if (tau <= 0.5)
    throw std::runtime_error("membrane_bound: tau must exceed 1/2 (theorem hypothesis)");
  if (M < 0) throw std::runtime_error("membrane_bound: M must be nonnegative");
  double lambda = std::fabs(1.0 - 1.0 / tau);
  double b_sub = (M + std::fabs(u_reset)) / (tau * (1.0 - lambda));
  return std::max(v_th, std::fabs(u_reset) + b_sub);
}

BoundReport simulate_bound(const BoundConfig& cfg) {
  BoundReport rep;
  rep.config = cfg;
  rep.analytic_bound = membrane_bound(cfg.tau, cfg.v_th, cfg.M, cfg.u_reset);
  Rng rng(mix_seed(cfg.seed, 0x626E64ULL));
  double u = 0.0;
  double max_abs = 0.0;
  for (size_t t = 1; t <= cfg.steps; ++t) {
    double h = cfg.adversarial ? cfg.M : rng.uniform(-cfg.M, cfg.M);
    LifScalarStep s = lif_scalar_step(u, h, cfg.tau, cfg.v_th, cfg.u_reset);
    max_abs = std::max({max_abs, std::fabs(s.u_pre), std::fabs(s.u_post)});
    u = s.u_post;
  }
  rep.max_abs_u = max_abs;
  rep.pass = max_abs <= rep.analytic_bound + 1e-12;
  return rep;
}

std::vector<BoundReport> verify_boundedness(const std::vector<double>& taus,
                                            const std::vector<double>& v_ths,
                                            const std::vector<double>& Ms,
                                            size_t steps, size_t seeds) {
  std::vector<BoundReport> out;
  for (double tau : taus)
    for (double vth : v_ths)
      for (double M : Ms)
        for (size_t s = 0; s < seeds; ++s) {
          BoundConfig cfg;
          cfg.tau = tau;
          cfg.v_th = vth;
          cfg.M = M;
          cfg.steps = steps;
          cfg.seed = s;
          out.push_back(simulate_bound(cfg));
        }
  return out;
}

// ---------------------------------------------------------------------------
// Theorem 2

BiboReport verify_bibo(const BiboConfig& cfg) {
  Rng rng(mix_seed(cfg.seed, 0x6269626FULL));
  size_t n = cfg.neurons;
  // random wiring: exactly fan_in presynaptic inputs per neuron
  Tensor W = Tensor::zeros(n, n);
  for (size_t w = 0; w < n; ++w) {
    std::vector<uint32_t> pre(n);
    for (size_t i = 0; i < n; ++i) pre[i] = static_cast<uint32_t>(i);
    rng.shuffle(pre);
    for (size_t j = 0; j < cfg.fan_in; ++j)
      W.at(w, pre[j]) = rng.uniform(-cfg.w_max, cfg.w_max);
  }
  std::vector<double> taus(n);
  for (double& t : taus) t = rng.uniform(0.6, 3.0);

  double M = static_cast<double>(cfg.fan_in) * cfg.w_max + cfg.m_ext;
  BiboReport rep;
  for (size_t i = 0; i < n; ++i)
    rep.network_bound =
        std::max(rep.network_bound, membrane_bound(taus[i], cfg.v_th, M, cfg.u_reset));

  std::vector<double> u(n, 0.0), spikes(n, 0.0);
  for (size_t t = 1; t <= cfg.steps; ++t) {
    std::vector<double> next_spikes(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
      double h = rng.uniform(-cfg.m_ext, cfg.m_ext);
      for (size_t j = 0; j < n; ++j)
        if (W.at(i, j) != 0.0) h += W.at(i, j) * spikes[j];
      LifScalarStep s = lif_scalar_step(u[i], h, taus[i], cfg.v_th, cfg.u_reset);
      rep.max_abs_u = std::max({rep.max_abs_u, std::fabs(s.u_pre), std::fabs(s.u_post)});
      u[i] = s.u_post;
      next_spikes[i] = s.spike;
    }
    spikes = std::move(next_spikes);
  }
  rep.pass = rep.max_abs_u <= rep.network_bound + 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// Theorem 3

double contraction_factor(const std::vector<double>& taus, double alpha,
                          const Tensor& W) {
  double lambda_max = 0.0;
  for (double tau : taus) {
    if (tau <= 0.5) throw std::runtime_error("contraction_factor: tau must exceed 1/2");
    lambda_max = std::max(lambda_max, std::fabs(1.0 - 1.0 / tau));
  }
  double max_sum = 0.0;
  for (size_t w = 0; w < W.rows(); ++w) {
    double s = 0.0;
    for (size_t v = 0; v < W.cols(); ++v) s += std::fabs(W.at(w, v));
    max_sum = std::max(max_sum, s);
  }
  return lambda_max + alpha * max_sum;
}

ToyRecurrentNet random_contractive_net(size_t neurons, uint64_t seed) {
  Rng rng(mix_seed(seed, 0x726E6574ULL));
  ToyRecurrentNet net;
  net.taus.resize(neurons);
  double lambda_max = 0.0;
  for (double& t : net.taus) {
    t = rng.uniform(0.8, 3.0);
    lambda_max = std::max(lambda_max, std::fabs(1.0 - 1.0 / t));
  }
  net.W = Tensor::rand_uniform(neurons, neurons, -1.0, 1.0, rng);
  // rescale so rho lands strictly below one
  double target = rng.uniform(0.05, 0.95 - lambda_max);
  double max_sum = 0.0;
  for (size_t w = 0; w < neurons; ++w) {
    double s = 0.0;
    for (size_t v = 0; v < neurons; ++v) s += std::fabs(net.W.at(w, v));
    max_sum = std::max(max_sum, s);
  }
  for (double& v : net.W.data) v *= target / max_sum;
  net.v_th = 0.5;
  net.alpha = 1.0;
  return net;
}

ContractionReport verify_contraction(const ToyRecurrentNet& net, size_t horizon,
                                     uint64_t seed, double tol) {
  size_t n = net.taus.size();
  ContractionReport rep;
  rep.alpha = net.alpha;
  for (double tau : net.taus)
    rep.lambda_max = std::max(rep.lambda_max, std::fabs(1.0 - 1.0 / tau));
  for (size_t w = 0; w < n; ++w) {
    double s = 0.0;
    for (size_t v = 0; v < n; ++v) s += std::fabs(net.W.at(w, v));
    rep.max_abs_weight_sum = std::max(rep.max_abs_weight_sum, s);
  }
  rep.rho = rep.lambda_max + net.alpha * rep.max_abs_weight_sum;

  Rng rng(mix_seed(seed, 0x636F6E74ULL));
  Tape tp(true);
  Tensor lambda_vec(n, 1);
  for (size_t i = 0; i < n; ++i) lambda_vec.at(i, 0) = 1.0 - 1.0 / net.taus[i];
  Var lambda_c = tp.constant(lambda_vec, "lambda");
  Var W_c = tp.constant(net.W, "W");
  Var vth_c = tp.constant(Tensor::full(n, 1, net.v_th), "v_th");
  SurrogateConfig sg{net.alpha};

  Var u_post = tp.constant(Tensor::zeros(n, 1), "u0");
  std::vector<Var> u_pre_nodes;
  u_pre_nodes.reserve(horizon);
  Var spikes{};
  for (size_t t = 1; t <= horizon; ++t) {
    Var drive = tp.constant(Tensor::rand_uniform(n, 1, -1.0, 1.0, rng), "ext");
    Var u_pre = tp.add(tp.mul(lambda_c, u_post), drive);
    if (t > 1) u_pre = tp.add(u_pre, tp.matmul(W_c, spikes));
    Var over = tp.add(u_pre, tp.scale(vth_c, -1.0));
    spikes = tp.spike(over, sg, SpikeMode::Hard);
    u_post = tp.st_reset(u_pre, spikes, net.u_reset);
    u_pre_nodes.push_back(u_pre);
  }
  // random linear loss at the horizon
  Tensor g = Tensor::rand_uniform(n, 1, -1.0, 1.0, rng);
  Var loss = tp.sum(tp.mul(tp.constant(g, "g"), u_pre_nodes.back()));
  tp.backward(loss);

  rep.delta_l1.resize(horizon);
  for (size_t t = 0; t < horizon; ++t) rep.delta_l1[t] = l1_norm(tp.grad(u_pre_nodes[t]));

  if (rep.rho >= 1.0) {
    rep.envelope_checked = false;
    // theorem offers no envelope; report bounded norms over the short horizon
    rep.pass = std::all_of(rep.delta_l1.begin(), rep.delta_l1.end(),
                           [](double v) { return std::isfinite(v); });
    return rep;
  }
  rep.envelope_checked = true;
  rep.pass = true;
  double tail = rep.delta_l1.back();
  for (size_t t = 0; t < horizon; ++t) {
    double envelope =
        std::pow(rep.rho, static_cast<double>(horizon - 1 - t)) * tail + tol;
    rep.max_envelope_excess =
        std::max(rep.max_envelope_excess, rep.delta_l1[t] - envelope);
    if (rep.delta_l1[t] > envelope) rep.pass = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// 1-WL

WlGraph WlGraph::from_edges(size_t n,
                            const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
  WlGraph g;
  g.n = n;
  g.adj.assign(n, {});
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::runtime_error("wl graph: edge endpoint out of range");
    if (u == v) continue;
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (auto& nb : g.adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

WlGraph WlGraph::star(size_t leaves) {
  std::vector<std::pair<uint32_t, uint32_t>> e;
  for (uint32_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return from_edges(leaves + 1, e);
}

WlGraph WlGraph::path(size_t n) {
  std::vector<std::pair<uint32_t, uint32_t>> e;
  for (uint32_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return from_edges(n, e);
}

WlGraph WlGraph::cycle(size_t n) {
  std::vector<std::pair<uint32_t, uint32_t>> e;
  for (uint32_t i = 0; i < n; ++i) e.emplace_back(i, static_cast<uint32_t>((i + 1) % n));
  return from_edges(n, e);
}

WlGraph WlGraph::complete(size_t n) {
  std::vector<std::pair<uint32_t, uint32_t>> e;
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return from_edges(n, e);
}

WlGraph WlGraph::disjoint_union(const WlGraph& a, const WlGraph& b) {
  WlGraph g;
  g.n = a.n + b.n;
  g.adj = a.adj;
  g.adj.resize(g.n);
  for (size_t v = 0; v < b.n; ++v)
    for (uint32_t u : b.adj[v])
      g.adj[a.n + v].push_back(static_cast<uint32_t>(a.n) + u);
  return g;
}

namespace {

uint64_t hash_mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
  return h ^ (h >> 27);
}

size_t partition_classes(const std::vector<uint64_t>& colors) {
  std::set<uint64_t> s(colors.begin(), colors.end());
  return s.size();
}

template <typename NextColor>
std::vector<std::vector<uint64_t>> refine(const WlGraph& g, size_t rounds,
                                          NextColor next_color) {
  std::vector<std::vector<uint64_t>> rounds_out;
  std::vector<uint64_t> colors(g.n, 0);
  rounds_out.push_back(colors);
  for (size_t r = 0; r < rounds; ++r) {
    std::vector<uint64_t> next(g.n);
    for (size_t v = 0; v < g.n; ++v) {
      std::vector<uint64_t> nb;
      nb.reserve(g.adj[v].size());
      for (uint32_t u : g.adj[v]) nb.push_back(colors[u]);
      std::sort(nb.begin(), nb.end());
      next[v] = next_color(colors[v], nb);
    }
    bool stable = partition_classes(next) == partition_classes(colors);
    colors = std::move(next);
    rounds_out.push_back(colors);
    if (stable) break;
  }
  return rounds_out;
}

}  // namespace

std::vector<std::vector<uint64_t>> wl_refinement(const WlGraph& g, size_t rounds) {
  return refine(g, rounds, [](uint64_t own, const std::vector<uint64_t>& nb) {
    uint64_t h = hash_mix(0x574C31ULL, own);
    for (uint64_t c : nb) h = hash_mix(h, c);
    h = hash_mix(h, nb.size());
    return h;
  });
}

std::vector<std::vector<uint64_t>> wl_refinement_canonical(const WlGraph& g,
                                                           size_t rounds) {
  // dense relabeling through an ordered map; exact, collision-free
  std::map<std::vector<uint64_t>, uint64_t> dictionary;
  return refine(g, rounds, [&dictionary](uint64_t own, const std::vector<uint64_t>& nb) {
    std::vector<uint64_t> key;
    key.reserve(nb.size() + 1);
    key.push_back(own);
    key.insert(key.end(), nb.begin(), nb.end());
    auto [it, inserted] = dictionary.emplace(key, dictionary.size() + 1);
    return it->second;
  });
}

std::vector<std::pair<uint64_t, size_t>> wl_histogram(const std::vector<uint64_t>& colors) {
  std::map<uint64_t, size_t> counts;
  for (uint64_t c : colors) ++counts[c];
  return {counts.begin(), counts.end()};
}

bool wl_distinguishes(const WlGraph& a, const WlGraph& b) {
  if (a.n != b.n) return true;
  WlGraph u = WlGraph::disjoint_union(a, b);
  auto rounds = wl_refinement(u, u.n);
  const std::vector<uint64_t>& final_colors = rounds.back();
  std::vector<uint64_t> ca(final_colors.begin(), final_colors.begin() + a.n);
  std::vector<uint64_t> cb(final_colors.begin() + a.n, final_colors.end());
  return wl_histogram(ca) != wl_histogram(cb);
}

bool same_partitions(const std::vector<std::vector<uint64_t>>& a,
                     const std::vector<std::vector<uint64_t>>& b) {
  if (a.size() != b.size()) return false;
  for (size_t r = 0; r < a.size(); ++r) {
    if (a[r].size() != b[r].size()) return false;
    std::map<uint64_t, uint64_t> fwd, bwd;
    for (size_t v = 0; v < a[r].size(); ++v) {
      auto [itf, newf] = fwd.emplace(a[r][v], b[r][v]);
      if (!newf && itf->second != b[r][v]) return false;
      auto [itb, newb] = bwd.emplace(b[r][v], a[r][v]);
      if (!newb && itb->second != a[r][v]) return false;
    }
  }
  return true;
}

namespace {

// Sum-aggregation spiking encoder over full neighborhoods with carried
// membrane state; returns the sorted multiset of per-node spike-count
// vectors (layer-1 and layer-2 counts concatenated). Neighbor
// contributions are summed in lexicographic value order so isomorphic
// graphs produce bit-identical multisets.
std::vector<std::vector<double>> spike_count_signature(const WlGraph& g, double gamma,
                                                       size_t T, uint64_t seed) {
  constexpr size_t d1 = 8, d2 = 8;
  Rng rng(mix_seed(seed, 0x77697473ULL));
  Tensor Ws1 = Tensor::xavier_uniform(1, d1, rng);
  Tensor Wn1 = Tensor::xavier_uniform(1, d1, rng);
  Tensor Wp1 = Tensor::xavier_uniform(d1, d1, rng);
  Tensor Ws2 = Tensor::xavier_uniform(d1, d2, rng);
  Tensor Wn2 = Tensor::xavier_uniform(d1, d2, rng);
  Tensor Wp2 = Tensor::xavier_uniform(d2, d2, rng);
  const double tau = 2.0, v_th = 1.0, u_reset = 0.0;

  size_t n = g.n;
  std::vector<std::vector<double>> u1(n, std::vector<double>(d1, 0.0));
  std::vector<std::vector<double>> u2(n, std::vector<double>(d2, 0.0));
  std::vector<std::vector<double>> counts(n, std::vector<double>(d1 + d2, 0.0));

  auto sorted_sum = [](std::vector<std::vector<double>> rows) {
    std::sort(rows.begin(), rows.end());
    std::vector<double> acc(rows.empty() ? 0 : rows[0].size(), 0.0);
    for (const auto& r : rows)
      for (size_t j = 0; j < r.size(); ++j) acc[j] += r[j];
    return acc;
  };

  for (size_t t = 0; t < T; ++t) {
    // layer 1: input gamma per node, neighbor sum = deg * gamma
    std::vector<std::vector<double>> s1_next(n, std::vector<double>(d1, 0.0));
    for (size_t v = 0; v < n; ++v) {
      double deg = static_cast<double>(g.adj[v].size());
      std::vector<double> h(d1, 0.0);
      for (size_t j = 0; j < d1; ++j)
        h[j] = gamma * Ws1.at(0, j) + deg * gamma * Wn1.at(0, j);
      std::vector<double> pre(d1, 0.0);
      for (size_t j = 0; j < d1; ++j)
        for (size_t k = 0; k < d1; ++k) pre[k] += h[j] * Wp1.at(j, k);
      for (size_t j = 0; j < d1; ++j) {
        LifScalarStep st = lif_scalar_step(u1[v][j], pre[j], tau, v_th, u_reset);
        u1[v][j] = st.u_post;
        s1_next[v][j] = st.spike;
        counts[v][j] += st.spike;
      }
    }
    // layer 2 consumes the previous layer-1 spikes of the neighbors
    for (size_t v = 0; v < n; ++v) {
      std::vector<std::vector<double>> nb_rows;
      nb_rows.reserve(g.adj[v].size());
      for (uint32_t u : g.adj[v]) {
        std::vector<double> proj(d2, 0.0);
        for (size_t j = 0; j < d1; ++j)
          for (size_t k = 0; k < d2; ++k) proj[k] += s1_next[u][j] * Wn2.at(j, k);
        nb_rows.push_back(std::move(proj));
      }
      std::vector<double> h = nb_rows.empty() ? std::vector<double>(d2, 0.0)
                                              : sorted_sum(std::move(nb_rows));
      for (size_t j = 0; j < d1; ++j)
        for (size_t k = 0; k < d2; ++k) h[k] += s1_next[v][j] * Ws2.at(j, k);
      std::vector<double> pre(d2, 0.0);
      for (size_t j = 0; j < d2; ++j)
        for (size_t k = 0; k < d2; ++k) pre[k] += h[j] * Wp2.at(j, k);
      for (size_t j = 0; j < d2; ++j) {
        LifScalarStep st = lif_scalar_step(u2[v][j], pre[j], tau, v_th, u_reset);
        u2[v][j] = st.u_post;
        counts[v][d1 + j] += st.spike;
      }
    }
  }
  std::sort(counts.begin(), counts.end());
  return counts;
}

}  // namespace

WlSeparationResult wl_separation_check(const WlGraph& a, const WlGraph& b,
                                       const std::vector<double>& gammas, size_t T,
                                       uint64_t seed) {
  WlSeparationResult res;
  res.precondition_ok = wl_distinguishes(a, b);
  if (!res.precondition_ok) return res;
  for (double gamma : gammas) {
    auto sig_a = spike_count_signature(a, gamma, T, seed);
    auto sig_b = spike_count_signature(b, gamma, T, seed);
    if (sig_a != sig_b) {
      res.separated = true;
      res.separating_gamma = gamma;
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// complexity

ComplexityEstimate complexity_estimate(size_t N, size_t T, size_t S, size_t K, size_t d,
                                       size_t B) {
  if (!N || !T || !S || !K || !d || !B)
    throw std::runtime_error("complexity_estimate: all sizes must be positive");
  ComplexityEstimate e;
  double n = static_cast<double>(N), t = static_cast<double>(T);
  double s = static_cast<double>(S), k = static_cast<double>(K);
  double dd = static_cast<double>(d), bb = static_cast<double>(B);
  e.spatial_ops = n * s * k * dd * dd * t;
  e.temporal_ops = n * dd * dd * t * t;
  e.total_ops = e.spatial_ops + e.temporal_ops;
  e.memory_scalars = bb * t * dd + bb * s * k * dd;
  return e;
}

LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::runtime_error("linear_fit: need at least two points");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LineFit f;
  double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, ybar = sy / n;
  for (size_t i = 0; i < xs.size(); ++i) {
    double pred = f.slope * xs[i] + f.intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace chronospike
