#include "chronospike/tensor.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace chronospike {

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  size_t r = rows.size();
  size_t c = rows.begin()->size();
  Tensor t(r, c);
  size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw std::runtime_error("from_rows: ragged rows");
    for (double v : row) t.data[i++] = v;
  }
  return t;
}

Tensor Tensor::rand_uniform(size_t r, size_t c, double lo, double hi, Rng& rng) {
  Tensor t(r, c);
  for (double& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

Tensor Tensor::rand_normal(size_t r, size_t c, double mean, double stddev, Rng& rng) {
  Tensor t(r, c);
  for (double& v : t.data) v = rng.normal(mean, stddev);
  return t;
}

Tensor Tensor::xavier_uniform(size_t r, size_t c, Rng& rng) {
  double bound = std::sqrt(6.0 / static_cast<double>(r + c));
  return rand_uniform(r, c, -bound, bound, rng);
}

double Tensor::scalar_value() const {
  if (!is_scalar()) throw std::runtime_error("scalar_value: tensor has " + shape_str());
  return data[0];
}

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%zux%zu", rows(), cols());
  return buf;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j);
  return out;
}

Tensor matmul_plain(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw std::runtime_error("matmul_plain: shape mismatch " + a.shape_str() + " x " +
                             b.shape_str());
  Tensor out(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t k = 0; k < a.cols(); ++k) {
      double av = a.at(i, k);
      if (av == 0.0) continue;
      for (size_t j = 0; j < b.cols(); ++j) out.at(i, j) += av * b.at(k, j);
    }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l1_norm(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data) s += std::fabs(v);
  return s;
}

double l2_norm(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Tensor& a) {
  double m = 0.0;
  for (double v : a.data) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::fabs(a.data[i] - b.data[i]));
  return m;
}

double max_rel_err(const Tensor& got, const Tensor& want, double floor) {
  double m = 0.0;
  for (size_t i = 0; i < got.data.size(); ++i) {
    double denom = std::max(std::fabs(want.data[i]), floor);
    m = std::max(m, std::fabs(got.data[i] - want.data[i]) / denom);
  }
  return m;
}

}  // namespace chronospike
