#pragma once

#include <cstdint>

#include "chronospike/graph_store.hpp"

namespace chronospike {

// Planted temporal-community generator. Nodes start in one of C
// communities; at switch_step a seeded fraction migrates to a different
// community and the label is the post-switch community. Features are the
// current community one-hot plus Gaussian noise that is mild before the
// switch and heavy after it, so one late snapshot is a weak predictor
// while the full sequence is a strong one.
struct GenConfig {
  size_t num_nodes = 200;
  size_t num_steps = 10;
  size_t num_classes = 4;
  double intra_prob = 0.15;
  double inter_prob = 0.01;
  size_t switch_step = 5;       // steps >= switch_step use post communities
  double feature_noise = 2.0;   // post-switch sigma; pre-switch uses 0.15x
  double migrate_fraction = 0.5;
  uint64_t seed = 7;
  double train_frac = 0.6;
  double val_frac = 0.2;

  void validate() const;
};

SnapshotSequence generate(const GenConfig& cfg);

}  // namespace chronospike
