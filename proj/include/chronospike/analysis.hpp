#pragma once

#include <string>
#include <vector>

#include "chronospike/tensor.hpp"

namespace chronospike {

// Per-layer spike raster plus pre-spike membrane values collected during an
// encoder pass: one (timesteps x neurons) matrix per sample per layer.
struct SpikeLog {
  struct Layer {
    size_t neurons = 0;
    size_t steps = 0;
    std::vector<Tensor> spikes;     // per sample, steps x neurons, entries in {0,1}
    std::vector<Tensor> membranes;  // per sample, steps x neurons
  };
  std::vector<Layer> layers;

  size_t num_samples() const { return layers.empty() ? 0 : layers[0].spikes.size(); }
};

struct FiringStats {
  double mean_rate = 0.0;      // fraction of ones over the whole log
  double silence_ratio = 0.0;  // fraction of (neuron, sample) pairs with no spikes
  double rate_q25 = 0.0;       // quartiles of the per-sample firing rate
  double rate_q50 = 0.0;
  double rate_q75 = 0.0;
};
FiringStats firing_stats(const SpikeLog::Layer& layer);

struct MembraneStats {
  std::vector<double> bin_edges;  // bins + 1 entries
  std::vector<size_t> counts;
  double mean = 0.0;
  double stddev = 0.0;
  double sparse_pct = 0.0;  // percentage with |u| < 0.01
};
MembraneStats membrane_histogram(const SpikeLog::Layer& layer, size_t bins);

// Average attention mass assigned to each key step, over samples, heads and
// query positions; sums to one.
// attn_maps: [sample][head] -> T x T attention matrix.
std::vector<double> temporal_importance(
    const std::vector<std::vector<Tensor>>& attn_maps);

// plot-ready TSV writers (fixed headers, documented in the README)
void write_firing_stats_tsv(const std::vector<FiringStats>& per_layer,
                            const std::string& path);
void write_membrane_tsv(const std::vector<MembraneStats>& per_layer,
                        const std::string& path);
void write_importance_tsv(const std::vector<double>& importance,
                          const std::string& path);
void write_raster_tsv(const SpikeLog& log, const std::string& path);

}  // namespace chronospike
