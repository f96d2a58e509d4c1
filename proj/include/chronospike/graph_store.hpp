#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chronospike/rng.hpp"
#include "chronospike/tensor.hpp"

namespace chronospike {

struct LoadError : std::runtime_error {
  explicit LoadError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Split { Train, Val, Test, None };

// Dynamic graph as a sequence of snapshots over a fixed node set.
// Edges are stored per step, sorted and deduplicated.
struct SnapshotSequence {
  size_t num_nodes = 0;
  size_t num_steps = 0;
  size_t feature_dim = 0;
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> edges;  // per step
  std::vector<Tensor> features;                                   // per step, N x d
  std::vector<int> labels;                                        // -1 = unlabeled
  std::vector<Split> splits;
  bool directed = false;

  size_t num_classes() const;
  std::vector<uint32_t> nodes_in_split(Split s) const;
  // keep only the final snapshot (the "static" ablation)
  SnapshotSequence last_snapshot_only() const;
  void validate() const;
};

// Per-column standardization to zero mean / unit variance across all steps;
// zero-variance columns divide by 1.
void standardize_features(SnapshotSequence& seq);

// edges.tsv / features.tsv / labels.tsv / splits.tsv reader.
// Undirected neighborhood semantics by default (both endpoints gain each
// other); `directed` keeps edges one-way.
SnapshotSequence load_snapshots(const std::string& dataset_dir, bool directed = false,
                                bool standardize = true);
void write_dataset(const SnapshotSequence& seq, const std::string& dataset_dir);

// Union of all edge sets observed strictly before the current step.
class CumulativeAdjacency {
 public:
  explicit CumulativeAdjacency(size_t num_nodes)
      : step_(0), neighbors_(num_nodes) {}

  // advance so that the adjacency holds the union of edges at steps < t
  // (t is 0-based here; t = 0 means empty)
  void advance_to(const SnapshotSequence& seq, size_t t);
  size_t step() const { return step_; }
  const std::vector<uint32_t>& neighbors(uint32_t v) const { return neighbors_[v]; }

 private:
  size_t step_;
  std::vector<std::vector<uint32_t>> neighbors_;  // sorted unique
};

// Adjacency of one snapshot, built once per step.
std::vector<std::vector<uint32_t>> snapshot_adjacency(const SnapshotSequence& seq,
                                                      size_t t);

enum class NeighborSource : uint8_t { Historical, Current, SelfFallback };

struct NeighborSample {
  uint32_t center = 0;
  size_t step = 0;
  std::vector<uint32_t> ids;           // exactly S entries
  std::vector<NeighborSource> source;  // per entry
};

// Hybrid fixed-fan-out sampler over (cumulative, current) sources.
// Each slot picks the historical source with probability p, else current;
// an empty pool falls back to the other, and a fully isolated node yields
// the center itself. Within a pool slots are drawn without replacement
// until the pool is exhausted, then with replacement.
class NeighborSampler {
 public:
  NeighborSampler(const SnapshotSequence& seq, size_t t,
                  const CumulativeAdjacency& cumulative);

  NeighborSample sample(uint32_t v, size_t fan_out, double p, Rng& rng) const;

 private:
  const SnapshotSequence& seq_;
  size_t t_;
  const CumulativeAdjacency& cumulative_;
  std::vector<std::vector<uint32_t>> current_;
};

}  // namespace chronospike
