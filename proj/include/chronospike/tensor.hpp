#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "chronospike/rng.hpp"

namespace chronospike {

// Dense row-major matrix of 64-bit floats. Rank is 1 or 2; a rank-1 tensor
// behaves as a single row. Every recorded op checks its output for
// NaN/Inf, so a Tensor in circulation is always finite.
struct Tensor {
  std::vector<size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(size_t r, size_t c, double fill = 0.0)
      : shape{r, c}, data(r * c, fill) {}

  static Tensor scalar(double v) {
    Tensor t(1, 1);
    t.data[0] = v;
    return t;
  }
  static Tensor zeros(size_t r, size_t c) { return Tensor(r, c, 0.0); }
  static Tensor full(size_t r, size_t c, double v) { return Tensor(r, c, v); }
  static Tensor row(std::initializer_list<double> vals) {
    Tensor t(1, vals.size());
    size_t i = 0;
    for (double v : vals) t.data[i++] = v;
    return t;
  }
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor rand_uniform(size_t r, size_t c, double lo, double hi, Rng& rng);
  static Tensor rand_normal(size_t r, size_t c, double mean, double stddev, Rng& rng);
  // Xavier/Glorot uniform with fan_in = r, fan_out = c
  static Tensor xavier_uniform(size_t r, size_t c, Rng& rng);

  size_t rank() const { return shape.size(); }
  size_t numel() const { return data.size(); }
  size_t rows() const { return shape.size() == 2 ? shape[0] : 1; }
  size_t cols() const { return shape.empty() ? 0 : shape.back(); }
  bool is_scalar() const { return numel() == 1; }

  double& at(size_t r, size_t c) { return data[r * cols() + c]; }
  double at(size_t r, size_t c) const { return data[r * cols() + c]; }
  double scalar_value() const;

  bool same_shape(const Tensor& o) const {
    return rows() == o.rows() && cols() == o.cols();
  }
  bool all_finite() const;
  std::string shape_str() const;
};

Tensor transpose(const Tensor& a);

// plain (unrecorded) helpers used by tests, oracles and simulators
Tensor matmul_plain(const Tensor& a, const Tensor& b);
double dot(const std::vector<double>& a, const std::vector<double>& b);
double l1_norm(const Tensor& a);
double l2_norm(const Tensor& a);
double max_abs(const Tensor& a);
double max_abs_diff(const Tensor& a, const Tensor& b);
double max_rel_err(const Tensor& got, const Tensor& want, double floor = 1e-8);

}  // namespace chronospike
