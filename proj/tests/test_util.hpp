#pragma once

#include <functional>
#include <vector>

#include "chronospike/tape.hpp"

namespace chronospike::testutil {

// Builds the same scalar loss twice per coordinate and compares analytic
// gradients against central finite differences. Returns the max relative
// error over all checked coordinates.
inline double fd_gradcheck(
    const std::vector<Tensor>& inputs,
    const std::function<Var(Tape&, const std::vector<Var>&)>& build, double h = 1e-5,
    size_t max_coords_per_input = static_cast<size_t>(-1)) {
  auto eval = [&](const std::vector<Tensor>& ins) {
    Tape tp(true);
    std::vector<Var> leaves;
    leaves.reserve(ins.size());
    for (const Tensor& t : ins) leaves.push_back(tp.leaf(t));
    Var loss = build(tp, leaves);
    return tp.value(loss).scalar_value();
  };

  // analytic pass
  Tape tp(true);
  std::vector<Var> leaves;
  for (const Tensor& t : inputs) leaves.push_back(tp.leaf(t));
  Var loss = build(tp, leaves);
  tp.backward(loss);

  double max_rel = 0.0;
  std::vector<Tensor> work = inputs;
  for (size_t i = 0; i < inputs.size(); ++i) {
    Tensor analytic = tp.grad(leaves[i]);
    size_t n = std::min(max_coords_per_input, inputs[i].numel());
    for (size_t j = 0; j < n; ++j) {
      double keep = work[i].data[j];
      work[i].data[j] = keep + h;
      double up = eval(work);
      work[i].data[j] = keep - h;
      double dn = eval(work);
      work[i].data[j] = keep;
      double fd = (up - dn) / (2.0 * h);
      double an = analytic.data[j];
      double denom = std::max({std::fabs(fd), std::fabs(an), 1e-6});
      max_rel = std::max(max_rel, std::fabs(fd - an) / denom);
    }
  }
  return max_rel;
}

// uniform values bounded away from zero (keeps relu/spike kinks out of
// the finite-difference window)
inline Tensor rand_away_from_zero(size_t r, size_t c, Rng& rng, double lo = 0.2,
                                  double hi = 1.0) {
  Tensor t(r, c);
  for (double& v : t.data) {
    double mag = rng.uniform(lo, hi);
    v = rng.uniform() < 0.5 ? -mag : mag;
  }
  return t;
}

}  // namespace chronospike::testutil
