#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "chronospike/datagen.hpp"
#include "chronospike/graph_store.hpp"

using namespace chronospike;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("chronospike_test_" + std::to_string(Rng(::getpid()).next_u64()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p);
  f << content;
}

void write_toy_dataset(const fs::path& dir) {
  // 3 nodes, 2 steps; duplicate edge on purpose
  write_file(dir / "edges.tsv", "0\t0\t1\n0\t0\t1\n1\t1\t2\n");
  write_file(dir / "features.tsv",
             "2\t3\t2\n"
             "1.0\t5.0\n0.0\t5.0\n1.0\t5.0\n"
             "2.0\t5.0\n1.0\t5.0\n0.0\t5.0\n");
  write_file(dir / "labels.tsv", "0\t0\n1\t1\n2\t0\n");
  write_file(dir / "splits.tsv", "0\ttrain\n1\tval\n2\ttest\n");
}

}  // namespace

TEST_CASE("toy dataset loads with dedup and standardization") {
  TempDir tmp;
  write_toy_dataset(tmp.path);
  SnapshotSequence seq = load_snapshots(tmp.path.string());
  CHECK(seq.num_nodes == 3);
  CHECK(seq.num_steps == 2);
  CHECK(seq.feature_dim == 2);
  REQUIRE(seq.edges[0].size() == 1);  // duplicate removed
  CHECK(seq.edges[0][0] == std::pair<uint32_t, uint32_t>{0, 1});

  // constant second column standardizes to exact zeros
  for (const Tensor& X : seq.features)
    for (size_t i = 0; i < X.rows(); ++i) CHECK(X.at(i, 1) == 0.0);
  // first column has zero mean across all steps
  double mean = 0.0;
  for (const Tensor& X : seq.features)
    for (size_t i = 0; i < X.rows(); ++i) mean += X.at(i, 0);
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("loader reports offending line numbers") {
  TempDir tmp;
  write_toy_dataset(tmp.path);
  write_file(tmp.path / "edges.tsv", "0\t0\t1\n0\t7\t1\n");
  CHECK_THROWS_WITH_AS(load_snapshots(tmp.path.string()), doctest::Contains(":2:"),
                       LoadError);

  write_toy_dataset(tmp.path);
  write_file(tmp.path / "features.tsv", "2\t3\t2\n1\t2\n3\n1\t2\n1\t2\n1\t2\n1\t2\n");
  CHECK_THROWS_WITH_AS(load_snapshots(tmp.path.string()), doctest::Contains("ragged"),
                       LoadError);

  write_toy_dataset(tmp.path);
  write_file(tmp.path / "edges.tsv", "5\t0\t1\n");
  CHECK_THROWS_WITH_AS(load_snapshots(tmp.path.string()),
                       doctest::Contains("unknown timestep"), LoadError);
}

TEST_CASE("static feature header reuses one block for all steps") {
  TempDir tmp;
  write_file(tmp.path / "edges.tsv", "0\t0\t1\n2\t1\t2\n");
  write_file(tmp.path / "features.tsv", "static\t3\t1\n1.0\n2.0\n3.0\n");
  write_file(tmp.path / "labels.tsv", "0\t0\n");
  write_file(tmp.path / "splits.tsv", "0\ttrain\n");
  SnapshotSequence seq = load_snapshots(tmp.path.string(), false, false);
  CHECK(seq.num_steps == 3);  // driven by max edge timestep
  CHECK(seq.features.size() == 3);
  CHECK(max_abs_diff(seq.features[0], seq.features[2]) == 0.0);
}

TEST_CASE("cumulative adjacency is the union of strictly earlier steps") {
  SnapshotSequence seq;
  seq.num_nodes = 3;
  seq.num_steps = 3;
  seq.feature_dim = 1;
  seq.edges = {{{0, 1}}, {{1, 2}}, {}};
  seq.features.assign(3, Tensor::zeros(3, 1));
  seq.labels.assign(3, -1);
  seq.splits.assign(3, Split::None);

  CumulativeAdjacency cum(3);
  cum.advance_to(seq, 0);
  CHECK(cum.neighbors(0).empty());  // t = first step: empty history

  CumulativeAdjacency cum2(3);
  cum2.advance_to(seq, 2);
  CHECK(cum2.neighbors(0) == std::vector<uint32_t>{1});
  CHECK(cum2.neighbors(1) == std::vector<uint32_t>{0, 2});
  CHECK(cum2.neighbors(2) == std::vector<uint32_t>{1});
}

TEST_CASE("cumulative matches a brute-force union on a random sequence") {
  Rng rng(99);
  SnapshotSequence seq;
  seq.num_nodes = 50;
  seq.num_steps = 8;
  seq.feature_dim = 1;
  seq.features.assign(8, Tensor::zeros(50, 1));
  seq.labels.assign(50, -1);
  seq.splits.assign(50, Split::None);
  seq.edges.resize(8);
  for (size_t t = 0; t < 8; ++t) {
    std::set<std::pair<uint32_t, uint32_t>> es;
    for (int k = 0; k < 60; ++k) {
      uint32_t u = static_cast<uint32_t>(rng.uniform_int(50));
      uint32_t v = static_cast<uint32_t>(rng.uniform_int(50));
      if (u != v) es.emplace(u, v);
    }
    seq.edges[t].assign(es.begin(), es.end());
  }

  CumulativeAdjacency cum(50);
  cum.advance_to(seq, 8);
  // brute-force union oracle
  std::vector<std::set<uint32_t>> want(50);
  for (size_t t = 0; t < 8; ++t)
    for (auto [u, v] : seq.edges[t]) {
      want[u].insert(v);
      want[v].insert(u);
    }
  for (uint32_t v = 0; v < 50; ++v) {
    std::vector<uint32_t> w(want[v].begin(), want[v].end());
    CHECK(cum.neighbors(v) == w);
  }
}

TEST_CASE("cumulative neighbor lists grow monotonically") {
  Rng rng(7);
  SnapshotSequence seq;
  seq.num_nodes = 20;
  seq.num_steps = 6;
  seq.feature_dim = 1;
  seq.features.assign(6, Tensor::zeros(20, 1));
  seq.labels.assign(20, -1);
  seq.splits.assign(20, Split::None);
  seq.edges.resize(6);
  for (auto& es : seq.edges)
    for (int k = 0; k < 10; ++k) {
      uint32_t u = static_cast<uint32_t>(rng.uniform_int(20));
      uint32_t v = static_cast<uint32_t>(rng.uniform_int(20));
      if (u != v) es.emplace_back(std::min(u, v), std::max(u, v));
    }
  for (auto& es : seq.edges) {
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
  }

  CumulativeAdjacency cum(20);
  std::vector<std::vector<uint32_t>> prev(20);
  for (size_t t = 0; t <= 6; ++t) {
    cum.advance_to(seq, t);
    for (uint32_t v = 0; v < 20; ++v) {
      CHECK(std::includes(cum.neighbors(v).begin(), cum.neighbors(v).end(),
                          prev[v].begin(), prev[v].end()));
      prev[v] = cum.neighbors(v);
    }
  }
}

TEST_CASE("hybrid sampler honors the source boundaries") {
  SnapshotSequence seq;
  seq.num_nodes = 4;
  seq.num_steps = 2;
  seq.feature_dim = 1;
  seq.edges = {{{0, 1}}, {{0, 2}, {0, 3}}};
  seq.features.assign(2, Tensor::zeros(4, 1));
  seq.labels.assign(4, -1);
  seq.splits.assign(4, Split::None);

  CumulativeAdjacency cum(4);
  cum.advance_to(seq, 1);
  NeighborSampler sampler(seq, 1, cum);

  Rng rng(3);
  NeighborSample hist = sampler.sample(0, 6, 1.0, rng);
  for (auto s : hist.source) CHECK(s == NeighborSource::Historical);
  for (auto id : hist.ids) CHECK(id == 1);  // only historical neighbor

  NeighborSample curr = sampler.sample(0, 6, 0.0, rng);
  for (auto s : curr.source) CHECK(s == NeighborSource::Current);
  for (auto id : curr.ids) CHECK((id == 2 || id == 3));
}

TEST_CASE("isolated node with empty history falls back to itself") {
  SnapshotSequence seq;
  seq.num_nodes = 3;
  seq.num_steps = 1;
  seq.feature_dim = 1;
  seq.edges = {{{1, 2}}};
  seq.features.assign(1, Tensor::zeros(3, 1));
  seq.labels.assign(3, -1);
  seq.splits.assign(3, Split::None);

  CumulativeAdjacency cum(3);
  cum.advance_to(seq, 0);
  NeighborSampler sampler(seq, 0, cum);
  Rng rng(5);
  NeighborSample s = sampler.sample(0, 4, 0.5, rng);
  CHECK(s.ids == std::vector<uint32_t>{0, 0, 0, 0});
  for (auto f : s.source) CHECK(f == NeighborSource::SelfFallback);
}

TEST_CASE("sampler draws without replacement until the pool is exhausted") {
  SnapshotSequence seq;
  seq.num_nodes = 6;
  seq.num_steps = 1;
  seq.feature_dim = 1;
  seq.edges = {{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}};
  seq.features.assign(1, Tensor::zeros(6, 1));
  seq.labels.assign(6, -1);
  seq.splits.assign(6, Split::None);
  CumulativeAdjacency cum(6);
  cum.advance_to(seq, 0);
  NeighborSampler sampler(seq, 0, cum);
  Rng rng(17);
  NeighborSample s = sampler.sample(0, 3, 0.0, rng);  // pool of 5, ask 3
  std::set<uint32_t> uniq(s.ids.begin(), s.ids.end());
  CHECK(uniq.size() == 3);  // no repeats while the pool lasts
}

TEST_CASE("sampler is deterministic under a fixed seed") {
  SnapshotSequence seq;
  seq.num_nodes = 10;
  seq.num_steps = 2;
  seq.feature_dim = 1;
  seq.edges = {{{0, 1}, {0, 2}, {0, 3}}, {{0, 4}, {0, 5}, {0, 6}}};
  seq.features.assign(2, Tensor::zeros(10, 1));
  seq.labels.assign(10, -1);
  seq.splits.assign(10, Split::None);
  CumulativeAdjacency cum(10);
  cum.advance_to(seq, 1);
  NeighborSampler sampler(seq, 1, cum);
  auto draw = [&] {
    Rng rng(41);
    std::vector<uint32_t> all;
    for (int i = 0; i < 20; ++i) {
      NeighborSample s = sampler.sample(0, 4, 0.5, rng);
      all.insert(all.end(), s.ids.begin(), s.ids.end());
    }
    return all;
  };
  CHECK(draw() == draw());
}

TEST_CASE("empirical source mix approaches p") {
  SnapshotSequence seq;
  seq.num_nodes = 8;
  seq.num_steps = 2;
  seq.feature_dim = 1;
  seq.edges = {{{0, 1}, {0, 2}}, {{0, 3}, {0, 4}}};
  seq.features.assign(2, Tensor::zeros(8, 1));
  seq.labels.assign(8, -1);
  seq.splits.assign(8, Split::None);
  CumulativeAdjacency cum(8);
  cum.advance_to(seq, 1);
  NeighborSampler sampler(seq, 1, cum);
  for (double p : {0.25, 0.5, 0.8}) {
    Rng rng(mix_seed(123, static_cast<uint64_t>(p * 1000)));
    size_t hist = 0, total = 0;
    while (total < 100000) {
      NeighborSample s = sampler.sample(0, 5, p, rng);
      for (auto f : s.source) {
        ++total;
        if (f == NeighborSource::Historical) ++hist;
      }
    }
    double frac = static_cast<double>(hist) / static_cast<double>(total);
    CHECK(std::fabs(frac - p) < 0.01);
  }
}

TEST_CASE("datagen is deterministic and writes byte-identical files") {
  GenConfig cfg;
  cfg.num_nodes = 40;
  cfg.num_steps = 4;
  cfg.switch_step = 2;
  cfg.seed = 11;
  SnapshotSequence a = generate(cfg);
  SnapshotSequence b = generate(cfg);
  CHECK(a.edges == b.edges);
  for (size_t t = 0; t < a.num_steps; ++t)
    CHECK(max_abs_diff(a.features[t], b.features[t]) == 0.0);
  CHECK(a.labels == b.labels);

  TempDir t1, t2;
  write_dataset(a, t1.path.string());
  write_dataset(b, t2.path.string());
  for (const char* name : {"edges.tsv", "features.tsv", "labels.tsv", "splits.tsv"}) {
    std::ifstream f1(t1.path / name), f2(t2.path / name);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
  }
}

TEST_CASE("datagen round-trips through the loader") {
  GenConfig cfg;
  cfg.num_nodes = 30;
  cfg.num_steps = 3;
  cfg.switch_step = 1;
  cfg.seed = 5;
  SnapshotSequence a = generate(cfg);
  TempDir tmp;
  write_dataset(a, tmp.path.string());
  SnapshotSequence b = load_snapshots(tmp.path.string(), false, false);
  CHECK(b.num_nodes == a.num_nodes);
  CHECK(b.num_steps == a.num_steps);
  CHECK(b.edges == a.edges);
  CHECK(b.labels == a.labels);
  for (size_t t = 0; t < a.num_steps; ++t)
    CHECK(max_abs_diff(a.features[t], b.features[t]) < 1e-14);
}

TEST_CASE("zero inter-community probability gives block-diagonal snapshots") {
  GenConfig cfg;
  cfg.num_nodes = 40;
  cfg.num_steps = 3;
  cfg.switch_step = 2;
  cfg.inter_prob = 0.0;
  cfg.migrate_fraction = 0.3;
  cfg.seed = 2;
  SnapshotSequence seq = generate(cfg);
  // recover the per-step community of each node from its label mechanics:
  // all edges must connect nodes that datagen placed in one community, which
  // in the inter_prob = 0 case means every edge is intra-community; verify
  // via connected components never mixing two labels after the switch
  for (auto [u, v] : seq.edges[2]) CHECK(seq.labels[u] == seq.labels[v]);
}

TEST_CASE("every node touches at least one edge per step") {
  GenConfig cfg;
  cfg.num_nodes = 60;
  cfg.num_steps = 4;
  cfg.switch_step = 2;
  cfg.intra_prob = 0.02;  // sparse on purpose so the retry path matters
  cfg.inter_prob = 0.0;
  cfg.seed = 3;
  SnapshotSequence seq = generate(cfg);
  for (size_t t = 0; t < seq.num_steps; ++t) {
    std::vector<bool> touched(seq.num_nodes, false);
    for (auto [u, v] : seq.edges[t]) touched[u] = touched[v] = true;
    for (bool b : touched) CHECK(b);
  }
}
