#include "chronospike/graph_store.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace chronospike {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == '\t' || ch == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

[[noreturn]] void fail(const std::string& file, size_t line_no, const std::string& what) {
  throw LoadError(file + ":" + std::to_string(line_no) + ": " + what);
}

long parse_int(const std::string& s, const std::string& file, size_t line_no) {
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) fail(file, line_no, "bad integer '" + s + "'");
    return v;
  } catch (const LoadError&) {
    throw;
  } catch (...) {
    fail(file, line_no, "bad integer '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& file, size_t line_no) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) fail(file, line_no, "bad number '" + s + "'");
    return v;
  } catch (const LoadError&) {
    throw;
  } catch (...) {
    fail(file, line_no, "bad number '" + s + "'");
  }
}

}  // namespace

size_t SnapshotSequence::num_classes() const {
  int mx = -1;
  for (int l : labels) mx = std::max(mx, l);
  return static_cast<size_t>(mx + 1);
}

std::vector<uint32_t> SnapshotSequence::nodes_in_split(Split s) const {
  std::vector<uint32_t> out;
  for (uint32_t v = 0; v < splits.size(); ++v)
    if (splits[v] == s) out.push_back(v);
  return out;
}

SnapshotSequence SnapshotSequence::last_snapshot_only() const {
  SnapshotSequence out = *this;
  out.num_steps = 1;
  out.edges = {edges.back()};
  out.features = {features.back()};
  return out;
}

void SnapshotSequence::validate() const {
  if (num_steps == 0 || num_nodes == 0) throw LoadError("empty snapshot sequence");
  if (edges.size() != num_steps || features.size() != num_steps)
    throw LoadError("snapshot sequence: step count mismatch");
  for (size_t t = 0; t < num_steps; ++t) {
    if (features[t].rows() != num_nodes || features[t].cols() != feature_dim)
      throw LoadError("features at step " + std::to_string(t) + " have shape " +
                      features[t].shape_str());
    for (auto [u, v] : edges[t])
      if (u >= num_nodes || v >= num_nodes)
        throw LoadError("edge endpoint out of range at step " + std::to_string(t));
  }
  if (labels.size() != num_nodes || splits.size() != num_nodes)
    throw LoadError("labels/splits length mismatch");
}

void standardize_features(SnapshotSequence& seq) {
  size_t d = seq.feature_dim;
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  double count = static_cast<double>(seq.num_steps * seq.num_nodes);
  for (const Tensor& X : seq.features)
    for (size_t i = 0; i < X.rows(); ++i)
      for (size_t j = 0; j < d; ++j) mean[j] += X.at(i, j);
  for (size_t j = 0; j < d; ++j) mean[j] /= count;
  for (const Tensor& X : seq.features)
    for (size_t i = 0; i < X.rows(); ++i)
      for (size_t j = 0; j < d; ++j) {
        double c = X.at(i, j) - mean[j];
        var[j] += c * c;
      }
  for (size_t j = 0; j < d; ++j) {
    var[j] /= count;
    if (var[j] <= 0.0) var[j] = 1.0;  // zero-variance guard
  }
  for (Tensor& X : seq.features)
    for (size_t i = 0; i < X.rows(); ++i)
      for (size_t j = 0; j < d; ++j)
        X.at(i, j) = (X.at(i, j) - mean[j]) / std::sqrt(var[j]);
}

SnapshotSequence load_snapshots(const std::string& dataset_dir, bool directed,
                                bool standardize) {
  namespace fs = std::filesystem;
  SnapshotSequence seq;
  seq.directed = directed;

  // features.tsv drives N, T, d
  const std::string feat_path = dataset_dir + "/features.tsv";
  std::ifstream ff(feat_path);
  if (!ff) throw LoadError("cannot open " + feat_path);
  std::string line;
  size_t line_no = 0;
  if (!std::getline(ff, line)) fail(feat_path, 1, "missing header");
  ++line_no;
  auto header = split_tabs(line);
  if (header.size() != 3) fail(feat_path, 1, "header must be 't n d' or 'static n d'");
  bool static_features = header[0] == "static";
  size_t T = static_features ? 1 : static_cast<size_t>(parse_int(header[0], feat_path, 1));
  size_t N = static_cast<size_t>(parse_int(header[1], feat_path, 1));
  size_t d = static_cast<size_t>(parse_int(header[2], feat_path, 1));
  if (T == 0 || N == 0 || d == 0) fail(feat_path, 1, "header sizes must be positive");

  std::vector<Tensor> blocks;
  for (size_t t = 0; t < T; ++t) {
    Tensor X(N, d);
    for (size_t i = 0; i < N; ++i) {
      if (!std::getline(ff, line))
        fail(feat_path, line_no + 1, "unexpected end of file in feature block");
      ++line_no;
      auto cells = split_tabs(line);
      if (cells.size() != d)
        fail(feat_path, line_no,
             "ragged feature row: expected " + std::to_string(d) + " values, got " +
                 std::to_string(cells.size()));
      for (size_t j = 0; j < d; ++j) X.at(i, j) = parse_double(cells[j], feat_path, line_no);
    }
    blocks.push_back(std::move(X));
  }

  // edges.tsv: lines "t u v"
  const std::string edge_path = dataset_dir + "/edges.tsv";
  std::ifstream ef(edge_path);
  if (!ef) throw LoadError("cannot open " + edge_path);
  size_t max_t = 0;
  std::vector<std::tuple<size_t, uint32_t, uint32_t>> raw_edges;
  line_no = 0;
  while (std::getline(ef, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != 3) fail(edge_path, line_no, "expected 't u v'");
    long t = parse_int(cells[0], edge_path, line_no);
    long u = parse_int(cells[1], edge_path, line_no);
    long v = parse_int(cells[2], edge_path, line_no);
    if (t < 0) fail(edge_path, line_no, "negative timestep");
    if (u < 0 || v < 0 || static_cast<size_t>(u) >= N || static_cast<size_t>(v) >= N)
      fail(edge_path, line_no, "node id out of range [0," + std::to_string(N) + ")");
    max_t = std::max(max_t, static_cast<size_t>(t));
    raw_edges.emplace_back(static_cast<size_t>(t), static_cast<uint32_t>(u),
                           static_cast<uint32_t>(v));
  }
  size_t steps = static_features ? max_t + 1 : T;
  for (auto& [t, u, v] : raw_edges)
    if (t >= steps)
      throw LoadError(edge_path + ": unknown timestep " + std::to_string(t) +
                      " (features declare " + std::to_string(steps) + " steps)");

  seq.num_nodes = N;
  seq.num_steps = steps;
  seq.feature_dim = d;
  seq.edges.assign(steps, {});
  for (auto& [t, u, v] : raw_edges) seq.edges[t].emplace_back(u, v);
  for (auto& es : seq.edges) {
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
  }
  if (static_features) {
    seq.features.assign(steps, blocks[0]);
  } else {
    seq.features = std::move(blocks);
  }

  // labels.tsv: "node class", optional per node
  seq.labels.assign(N, -1);
  const std::string label_path = dataset_dir + "/labels.tsv";
  std::ifstream lf(label_path);
  if (!lf) throw LoadError("cannot open " + label_path);
  line_no = 0;
  while (std::getline(lf, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != 2) fail(label_path, line_no, "expected 'node class'");
    long node = parse_int(cells[0], label_path, line_no);
    long cls = parse_int(cells[1], label_path, line_no);
    if (node < 0 || static_cast<size_t>(node) >= N)
      fail(label_path, line_no, "node id out of range");
    if (cls < 0) fail(label_path, line_no, "negative class id");
    seq.labels[node] = static_cast<int>(cls);
  }

  // splits.tsv: "node train|val|test"
  seq.splits.assign(N, Split::None);
  const std::string split_path = dataset_dir + "/splits.tsv";
  std::ifstream sf(split_path);
  if (!sf) throw LoadError("cannot open " + split_path);
  line_no = 0;
  while (std::getline(sf, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != 2) fail(split_path, line_no, "expected 'node split'");
    long node = parse_int(cells[0], split_path, line_no);
    if (node < 0 || static_cast<size_t>(node) >= N)
      fail(split_path, line_no, "node id out of range");
    if (cells[1] == "train") seq.splits[node] = Split::Train;
    else if (cells[1] == "val") seq.splits[node] = Split::Val;
    else if (cells[1] == "test") seq.splits[node] = Split::Test;
    else fail(split_path, line_no, "unknown split '" + cells[1] + "'");
  }

  seq.validate();
  if (standardize) standardize_features(seq);
  (void)fs::path{};
  return seq;
}

void write_dataset(const SnapshotSequence& seq, const std::string& dataset_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dataset_dir);
  {
    std::ofstream f(dataset_dir + "/edges.tsv");
    for (size_t t = 0; t < seq.num_steps; ++t)
      for (auto [u, v] : seq.edges[t]) f << t << '\t' << u << '\t' << v << '\n';
  }
  {
    std::ofstream f(dataset_dir + "/features.tsv");
    f << seq.num_steps << '\t' << seq.num_nodes << '\t' << seq.feature_dim << '\n';
    f.precision(17);
    for (const Tensor& X : seq.features)
      for (size_t i = 0; i < X.rows(); ++i) {
        for (size_t j = 0; j < X.cols(); ++j) {
          if (j) f << '\t';
          f << X.at(i, j);
        }
        f << '\n';
      }
  }
  {
    std::ofstream f(dataset_dir + "/labels.tsv");
    for (size_t v = 0; v < seq.num_nodes; ++v)
      if (seq.labels[v] >= 0) f << v << '\t' << seq.labels[v] << '\n';
  }
  {
    std::ofstream f(dataset_dir + "/splits.tsv");
    for (size_t v = 0; v < seq.num_nodes; ++v) {
      if (seq.splits[v] == Split::None) continue;
      const char* name = seq.splits[v] == Split::Train ? "train"
                         : seq.splits[v] == Split::Val ? "val"
                                                       : "test";
      f << v << '\t' << name << '\n';
    }
  }
}

void CumulativeAdjacency::advance_to(const SnapshotSequence& seq, size_t t) {
  if (t > seq.num_steps)
    throw LoadError("cumulative: step " + std::to_string(t) + " out of range");
  if (t < step_) throw LoadError("cumulative: cannot rewind");
  for (; step_ < t; ++step_) {
    for (auto [u, v] : seq.edges[step_]) {
      auto insert_sorted = [](std::vector<uint32_t>& vec, uint32_t x) {
        auto it = std::lower_bound(vec.begin(), vec.end(), x);
        if (it == vec.end() || *it != x) vec.insert(it, x);
      };
      insert_sorted(neighbors_[u], v);
      if (!seq.directed) insert_sorted(neighbors_[v], u);
    }
  }
}

std::vector<std::vector<uint32_t>> snapshot_adjacency(const SnapshotSequence& seq,
                                                      size_t t) {
  std::vector<std::vector<uint32_t>> adj(seq.num_nodes);
  for (auto [u, v] : seq.edges[t]) {
    adj[u].push_back(v);
    if (!seq.directed) adj[v].push_back(u);
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return adj;
}

NeighborSampler::NeighborSampler(const SnapshotSequence& seq, size_t t,
                                 const CumulativeAdjacency& cumulative)
    : seq_(seq), t_(t), cumulative_(cumulative) {
  if (cumulative.step() != t)
    throw LoadError("sampler: cumulative adjacency is at step " +
                    std::to_string(cumulative.step()) + ", expected " + std::to_string(t));
  current_ = snapshot_adjacency(seq, t);
}

NeighborSample NeighborSampler::sample(uint32_t v, size_t fan_out, double p,
                                       Rng& rng) const {
  if (p < 0.0 || p > 1.0) throw LoadError("sample: p must be in [0,1]");
  NeighborSample out;
  out.center = v;
  out.step = t_;
  out.ids.reserve(fan_out);
  out.source.reserve(fan_out);

  const std::vector<uint32_t>& hist = cumulative_.neighbors(v);
  const std::vector<uint32_t>& curr = current_[v];

  // lazily shuffled pool copies give without-replacement draws until the
  // pool runs out, then we wrap to with-replacement
  std::vector<uint32_t> hist_pool, curr_pool;
  size_t hist_used = 0, curr_used = 0;
  auto draw = [&](bool historical) -> uint32_t {
    const std::vector<uint32_t>& src = historical ? hist : curr;
    std::vector<uint32_t>& pool = historical ? hist_pool : curr_pool;
    size_t& used = historical ? hist_used : curr_used;
    if (pool.empty()) {
      pool = src;
      rng.shuffle(pool);
    }
    if (used < pool.size()) return pool[used++];
    return src[rng.uniform_int(src.size())];
  };

  for (size_t slot = 0; slot < fan_out; ++slot) {
    bool want_hist = rng.uniform() < p;
    bool hist_ok = !hist.empty();
    bool curr_ok = !curr.empty();
    if (!hist_ok && !curr_ok) {
      out.ids.push_back(v);
      out.source.push_back(NeighborSource::SelfFallback);
      continue;
    }
    bool use_hist = want_hist ? hist_ok : !curr_ok;
    out.ids.push_back(draw(use_hist));
    out.source.push_back(use_hist ? NeighborSource::Historical
                                  : NeighborSource::Current);
  }
  return out;
}

}  // namespace chronospike
