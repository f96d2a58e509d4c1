#include "chronospike/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace chronospike {

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  size_t lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

FiringStats firing_stats(const SpikeLog::Layer& layer) {
  if (layer.spikes.empty()) throw std::runtime_error("firing_stats: empty log");
  FiringStats st;
  size_t total = 0, ones = 0, silent_pairs = 0, pairs = 0;
  std::vector<double> per_sample_rate;
  per_sample_rate.reserve(layer.spikes.size());
  for (const Tensor& s : layer.spikes) {
    size_t sample_ones = 0;
    for (double v : s.data) {
      if (v != 0.0 && v != 1.0)
        throw std::runtime_error("firing_stats: non-binary spike value");
      if (v == 1.0) ++sample_ones;
    }
    ones += sample_ones;
    total += s.numel();
    per_sample_rate.push_back(static_cast<double>(sample_ones) /
                              static_cast<double>(s.numel()));
    // silence per (neuron, sample): no spike across the whole window
    for (size_t j = 0; j < s.cols(); ++j) {
      bool silent = true;
      for (size_t t = 0; t < s.rows(); ++t)
        if (s.at(t, j) == 1.0) {
          silent = false;
          break;
        }
      ++pairs;
      if (silent) ++silent_pairs;
    }
  }
  st.mean_rate = static_cast<double>(ones) / static_cast<double>(total);
  st.silence_ratio = static_cast<double>(silent_pairs) / static_cast<double>(pairs);
  st.rate_q25 = quantile(per_sample_rate, 0.25);
  st.rate_q50 = quantile(per_sample_rate, 0.50);
  st.rate_q75 = quantile(per_sample_rate, 0.75);
  return st;
}

MembraneStats membrane_histogram(const SpikeLog::Layer& layer, size_t bins) {
  if (bins < 2) throw std::runtime_error("membrane_histogram: need at least 2 bins");
  if (layer.membranes.empty()) throw std::runtime_error("membrane_histogram: empty log");
  MembraneStats st;
  double lo = layer.membranes[0].data[0], hi = lo;
  double sum = 0.0, sum2 = 0.0;
  size_t n = 0, sparse = 0;
  for (const Tensor& m : layer.membranes)
    for (double v : m.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      sum2 += v * v;
      if (std::fabs(v) < 0.01) ++sparse;
      ++n;
    }
  if (hi <= lo) hi = lo + 1.0;
  st.mean = sum / static_cast<double>(n);
  st.stddev = std::sqrt(std::max(0.0, sum2 / static_cast<double>(n) - st.mean * st.mean));
  st.sparse_pct = 100.0 * static_cast<double>(sparse) / static_cast<double>(n);
  st.bin_edges.resize(bins + 1);
  for (size_t b = 0; b <= bins; ++b)
    st.bin_edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  st.counts.assign(bins, 0);
  for (const Tensor& m : layer.membranes)
    for (double v : m.data) {
      size_t b = static_cast<size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
      if (b >= bins) b = bins - 1;
      ++st.counts[b];
    }
  return st;
}

std::vector<double> temporal_importance(
    const std::vector<std::vector<Tensor>>& attn_maps) {
  if (attn_maps.empty() || attn_maps[0].empty())
    throw std::runtime_error("temporal_importance: empty attention maps");
  size_t T = attn_maps[0][0].cols();
  std::vector<double> importance(T, 0.0);
  size_t rows_seen = 0;
  for (const auto& sample : attn_maps)
    for (const Tensor& A : sample) {
      if (A.cols() != T)
        throw std::runtime_error("temporal_importance: inconsistent horizon");
      for (size_t q = 0; q < A.rows(); ++q) {
        for (size_t k = 0; k < T; ++k) importance[k] += A.at(q, k);
        ++rows_seen;
      }
    }
  for (double& v : importance) v /= static_cast<double>(rows_seen);
  return importance;
}

void write_firing_stats_tsv(const std::vector<FiringStats>& per_layer,
                            const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "layer\tmean_rate\tsilence_ratio\trate_q25\trate_q50\trate_q75\n";
  f.precision(10);
  for (size_t l = 0; l < per_layer.size(); ++l) {
    const FiringStats& s = per_layer[l];
    f << l + 1 << '\t' << s.mean_rate << '\t' << s.silence_ratio << '\t' << s.rate_q25
      << '\t' << s.rate_q50 << '\t' << s.rate_q75 << '\n';
  }
}

void write_membrane_tsv(const std::vector<MembraneStats>& per_layer,
                        const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "layer\tbin_lo\tbin_hi\tcount\tmean\tstddev\tsparse_pct\n";
  f.precision(10);
  for (size_t l = 0; l < per_layer.size(); ++l) {
    const MembraneStats& s = per_layer[l];
    for (size_t b = 0; b + 1 < s.bin_edges.size(); ++b)
      f << l + 1 << '\t' << s.bin_edges[b] << '\t' << s.bin_edges[b + 1] << '\t'
        << s.counts[b] << '\t' << s.mean << '\t' << s.stddev << '\t' << s.sparse_pct
        << '\n';
  }
}

void write_importance_tsv(const std::vector<double>& importance,
                          const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "step\timportance\n";
  f.precision(10);
  for (size_t t = 0; t < importance.size(); ++t)
    f << t + 1 << '\t' << importance[t] << '\n';
}

void write_raster_tsv(const SpikeLog& log, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "layer\tsample\ttimestep\tneuron\n";
  for (size_t l = 0; l < log.layers.size(); ++l)
    for (size_t s = 0; s < log.layers[l].spikes.size(); ++s) {
      const Tensor& m = log.layers[l].spikes[s];
      for (size_t t = 0; t < m.rows(); ++t)
        for (size_t j = 0; j < m.cols(); ++j)
          if (m.at(t, j) == 1.0) f << l + 1 << '\t' << s << '\t' << t + 1 << '\t' << j << '\n';
    }
}

}  // namespace chronospike
