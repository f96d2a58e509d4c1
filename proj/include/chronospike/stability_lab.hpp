#pragma once

#include <cstdint>
#include <vector>

#include "chronospike/tape.hpp"

namespace chronospike {

// ---------------------------------------------------------------------------
// membrane boundedness

// max{ V_th, |u_reset| + (M + |u_reset|) / (tau * (1 - |1 - 1/tau|)) }
// valid for tau > 1/2 (outside that the theorem gives no guarantee)
double membrane_bound(double tau, double v_th, double M, double u_reset);

struct BoundConfig {
  double tau = 1.0;
  double v_th = 1.0;
  double M = 1.0;
  double u_reset = 0.0;
  size_t steps = 10000;
  uint64_t seed = 0;
  bool adversarial = false;  // constant +M drive instead of uniform noise
};

struct BoundReport {
  BoundConfig config;
  double analytic_bound = 0.0;
  double max_abs_u = 0.0;  // max over pre- and post-reset values, t >= 1
  bool pass = false;
};

BoundReport simulate_bound(const BoundConfig& cfg);
std::vector<BoundReport> verify_boundedness(const std::vector<double>& taus,
                                            const std::vector<double>& v_ths,
                                            const std::vector<double>& Ms,
                                            size_t steps, size_t seeds);

// ---------------------------------------------------------------------------
// network BIBO

struct BiboConfig {
  size_t neurons = 20;
  size_t fan_in = 5;
  double w_max = 0.5;
  double m_ext = 1.0;
  double v_th = 1.0;
  double u_reset = 0.0;
  size_t steps = 10000;
  uint64_t seed = 0;
};

struct BiboReport {
  double network_bound = 0.0;  // max over neurons of the Theorem-1 bound with M = S*Wmax + Mext
  double max_abs_u = 0.0;
  bool pass = false;
};

BiboReport verify_bibo(const BiboConfig& cfg);

// ---------------------------------------------------------------------------
// gradient contraction

// Toy recurrent spiking net matching the contraction theorem's Jacobians:
//   u_pre(t+1) = lambda .* u_post(t) + W s(t) + ext(t)
//   s(t) = 1[u_pre(t) >= v_th],  u_post = straight-through reset
// W is indexed [post][pre].
struct ToyRecurrentNet {
  std::vector<double> taus;  // per neuron, > 1/2
  Tensor W;                  // n x n
  double v_th = 0.5;
  double u_reset = 0.0;
  double alpha = 1.0;
};

// rho = max_i |1 - 1/tau_i| + alpha * max_post sum_pre |W[post][pre]|
double contraction_factor(const std::vector<double>& taus, double alpha,
                          const Tensor& W);

struct ContractionReport {
  double lambda_max = 0.0;
  double alpha = 1.0;
  double max_abs_weight_sum = 0.0;
  double rho = 0.0;
  std::vector<double> delta_l1;  // ||Delta(t)||_1 for t = 1..horizon
  bool envelope_checked = false; // skipped when rho >= 1 (hypothesis gate)
  bool pass = false;
  double max_envelope_excess = 0.0;
};

ContractionReport verify_contraction(const ToyRecurrentNet& net, size_t horizon,
                                     uint64_t seed, double tol = 1e-9);
ToyRecurrentNet random_contractive_net(size_t neurons, uint64_t seed);

// ---------------------------------------------------------------------------
// 1-WL refinement

struct WlGraph {
  size_t n = 0;
  std::vector<std::vector<uint32_t>> adj;  // undirected simple graph

  static WlGraph from_edges(size_t n, const std::vector<std::pair<uint32_t, uint32_t>>& edges);
  static WlGraph star(size_t leaves);      // S_k: center + k leaves
  static WlGraph path(size_t n);
  static WlGraph cycle(size_t n);
  static WlGraph complete(size_t n);
  static WlGraph disjoint_union(const WlGraph& a, const WlGraph& b);
};

// colors per round (round 0 = uniform initial coloring); stops early once
// the partition stabilizes. Primary implementation hashes (color, sorted
// neighbor colors); wl_refinement_canonical relabels tuples through an
// ordered map instead and is the independent cross-check.
std::vector<std::vector<uint64_t>> wl_refinement(const WlGraph& g, size_t rounds);
std::vector<std::vector<uint64_t>> wl_refinement_canonical(const WlGraph& g, size_t rounds);

// sorted (color,count) histogram of one round
std::vector<std::pair<uint64_t, size_t>> wl_histogram(const std::vector<uint64_t>& colors);
// true when the stabilized color histograms differ (computed on the
// disjoint union so colors align across the two graphs)
bool wl_distinguishes(const WlGraph& a, const WlGraph& b);
// partition equality per round, ignoring color names
bool same_partitions(const std::vector<std::vector<uint64_t>>& a,
                     const std::vector<std::vector<uint64_t>>& b);

struct WlSeparationResult {
  bool precondition_ok = false;  // 1-WL distinguishes the pair
  bool separated = false;
  double separating_gamma = 0.0;
};

// Empirical Theorem-4 witness: a randomly initialized sum-aggregation
// spiking encoder (full neighborhoods, carried membrane state, window T)
// run at several input scales gamma; separation = differing multisets of
// per-node spike-count vectors.
WlSeparationResult wl_separation_check(const WlGraph& a, const WlGraph& b,
                                       const std::vector<double>& gammas, size_t T,
                                       uint64_t seed);

// ---------------------------------------------------------------------------
// complexity accounting

struct ComplexityEstimate {
  double spatial_ops = 0.0;   // N * S * K * d^2 * T
  double temporal_ops = 0.0;  // N * d^2 * T^2
  double total_ops = 0.0;
  double memory_scalars = 0.0;  // B*T*d + B*S*K*d
};

ComplexityEstimate complexity_estimate(size_t N, size_t T, size_t S, size_t K, size_t d,
                                       size_t B);

// least-squares line fit quality for the measured-MACs linearity checks
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace chronospike
