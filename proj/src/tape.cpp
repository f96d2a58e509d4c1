#include "chronospike/tape.hpp"

#include <cmath>
#include <cstdio>

namespace chronospike {

double surrogate_grad(double x, double alpha) {
  double d = alpha * std::fabs(x) + 1.0;
  return alpha / (d * d);
}

double soft_spike(double x, double alpha) {
  return 1.0 / (1.0 + std::exp(-alpha * x));
}

double soft_spike_grad(double x, double alpha) {
  double s = soft_spike(x, alpha);
  return alpha * s * (1.0 - s);
}

void Tape::check_finite(const Tensor& t, const std::string& label) {
  if (!t.all_finite())
    throw TapeError(label + ": non-finite output");
}

Var Tape::push(Node n) {
  check_finite(n.value, n.label);
  if (!record_) {
    // no-grad mode keeps only the value
    n.backward = nullptr;
    n.inputs.clear();
  }
  nodes_.push_back(std::move(n));
  grads_.emplace_back();
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::leaf(Tensor value, std::string name) {
  Node n;
  n.label = name.empty() ? "leaf" : std::move(name);
  n.value = std::move(value);
  n.backward = nullptr;
  return push(std::move(n));
}

Var Tape::constant(Tensor value, std::string name) {
  Node n;
  n.label = name.empty() ? "const" : std::move(name);
  n.value = std::move(value);
  n.backward = nullptr;
  n.grad_target = false;
  return push(std::move(n));
}

Tensor Tape::grad(Var v) const {
  int id = check(v);
  if (grads_[id].has_value()) return *grads_[id];
  const Tensor& val = nodes_[id].value;
  return Tensor::zeros(val.rows(), val.cols());
}

void Tape::accumulate(int id, const Tensor& contrib) {
  if (!nodes_[id].grad_target) return;
  if (!grads_[id].has_value()) {
    grads_[id] = contrib;
    return;
  }
  Tensor& g = *grads_[id];
  for (size_t i = 0; i < g.data.size(); ++i) g.data[i] += contrib.data[i];
}

void Tape::backward(Var loss) {
  int loss_id = check(loss);
  if (!record_) throw TapeError("backward: tape was created in no-grad mode");
  if (backward_done_)
    throw TapeError("backward: already run on this tape; re-record first");
  if (!nodes_[loss_id].value.is_scalar())
    throw TapeError("backward: loss must be scalar, got " +
                    nodes_[loss_id].value.shape_str());
  if (static_cast<size_t>(loss_id) + 1 < nodes_.size())
    std::fprintf(stderr,
                 "warning: %zu op(s) recorded after the loss are ignored by backward\n",
                 nodes_.size() - 1 - static_cast<size_t>(loss_id));
  backward_done_ = true;
  grads_[loss_id] = Tensor::scalar(1.0);
  for (int i = loss_id; i >= 0; --i) {
    if (!nodes_[i].backward || !grads_[i].has_value()) continue;
    nodes_[i].backward(*this, *grads_[i], nodes_[i]);
  }
}

void Tape::clear() {
  nodes_.clear();
  grads_.clear();
  backward_done_ = false;
  macs_ = 0;
}

// ---------------------------------------------------------------------------
// ops

Var Tape::matmul(Var a, Var b) {
  int ia = check(a), ib = check(b);
  const Tensor& A = nodes_[ia].value;
  const Tensor& B = nodes_[ib].value;
  if (A.cols() != B.rows())
    throw TapeError("matmul: shape mismatch " + A.shape_str() + " x " + B.shape_str());
  Node n;
  n.label = "matmul";
  n.inputs = {ia, ib};
  n.value = matmul_plain(A, B);
  macs_ += A.rows() * A.cols() * B.cols();
  n.backward = [](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& A = t.nodes_[self.inputs[0]].value;
    const Tensor& B = t.nodes_[self.inputs[1]].value;
    t.accumulate(self.inputs[0], matmul_plain(gout, transpose(B)));
    t.accumulate(self.inputs[1], matmul_plain(transpose(A), gout));
    t.macs_ += 2 * A.rows() * A.cols() * B.cols();
  };
  return push(std::move(n));
}

namespace {

enum class Bcast { None, RowA, RowB };

Bcast broadcast_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.same_shape(b)) return Bcast::None;
  if (a.rows() == 1 && a.cols() == b.cols()) return Bcast::RowA;
  if (b.rows() == 1 && b.cols() == a.cols()) return Bcast::RowB;
  throw TapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                  b.shape_str());
}

Tensor row_reduce(const Tensor& g) {
  Tensor out(1, g.cols());
  for (size_t i = 0; i < g.rows(); ++i)
    for (size_t j = 0; j < g.cols(); ++j) out.at(0, j) += g.at(i, j);
  return out;
}

}  // namespace

Var Tape::add(Var a, Var b) {
  int ia = check(a), ib = check(b);
  const Tensor& A = nodes_[ia].value;
  const Tensor& B = nodes_[ib].value;
  Bcast bc = broadcast_kind(A, B, "add");
  Tensor out(std::max(A.rows(), B.rows()), A.cols());
  for (size_t i = 0; i < out.rows(); ++i)
    for (size_t j = 0; j < out.cols(); ++j)
      out.at(i, j) = A.at(bc == Bcast::RowA ? 0 : i, j) + B.at(bc == Bcast::RowB ? 0 : i, j);
  Node n;
  n.label = "add";
  n.inputs = {ia, ib};
  n.value = std::move(out);
  macs_ += n.value.numel();
  n.backward = [bc](Tape& t, const Tensor& gout, const Node& self) {
    t.accumulate(self.inputs[0], bc == Bcast::RowA ? row_reduce(gout) : gout);
    t.accumulate(self.inputs[1], bc == Bcast::RowB ? row_reduce(gout) : gout);
  };
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  int ia = check(a), ib = check(b);
  const Tensor& A = nodes_[ia].value;
  const Tensor& B = nodes_[ib].value;
  Bcast bc = broadcast_kind(A, B, "mul");
  Tensor out(std::max(A.rows(), B.rows()), A.cols());
  for (size_t i = 0; i < out.rows(); ++i)
    for (size_t j = 0; j < out.cols(); ++j)
      out.at(i, j) = A.at(bc == Bcast::RowA ? 0 : i, j) * B.at(bc == Bcast::RowB ? 0 : i, j);
  Node n;
  n.label = "mul";
  n.inputs = {ia, ib};
  n.value = std::move(out);
  macs_ += n.value.numel();
  n.backward = [bc](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& A = t.nodes_[self.inputs[0]].value;
    const Tensor& B = t.nodes_[self.inputs[1]].value;
    Tensor ga(gout.rows(), gout.cols());
    Tensor gb(gout.rows(), gout.cols());
    for (size_t i = 0; i < gout.rows(); ++i)
      for (size_t j = 0; j < gout.cols(); ++j) {
        ga.at(i, j) = gout.at(i, j) * B.at(bc == Bcast::RowB ? 0 : i, j);
        gb.at(i, j) = gout.at(i, j) * A.at(bc == Bcast::RowA ? 0 : i, j);
      }
    t.accumulate(self.inputs[0], bc == Bcast::RowA ? row_reduce(ga) : ga);
    t.accumulate(self.inputs[1], bc == Bcast::RowB ? row_reduce(gb) : gb);
    t.macs_ += 2 * gout.numel();
  };
  return push(std::move(n));
}

Var Tape::scale(Var a, double mult, double shift) {
  int ia = check(a);
  Tensor out = nodes_[ia].value;
  for (double& v : out.data) v = mult * v + shift;
  Node n;
  n.label = "scale";
  n.inputs = {ia};
  n.value = std::move(out);
  macs_ += n.value.numel();
  n.backward = [mult](Tape& t, const Tensor& gout, const Node& self) {
    Tensor g = gout;
    for (double& v : g.data) v *= mult;
    t.accumulate(self.inputs[0], g);
  };
  return push(std::move(n));
}

Var Tape::concat(const std::vector<Var>& parts, int axis) {
  if (parts.empty()) throw TapeError("concat: no inputs");
  if (axis != 0 && axis != 1) throw TapeError("concat: axis must be 0 or 1");
  std::vector<int> ids;
  ids.reserve(parts.size());
  for (Var p : parts) ids.push_back(check(p));
  const Tensor& first = nodes_[ids[0]].value;
  size_t rows = first.rows(), cols = first.cols();
  for (size_t k = 1; k < ids.size(); ++k) {
    const Tensor& tk = nodes_[ids[k]].value;
    if (axis == 0 && tk.cols() != cols)
      throw TapeError("concat axis 0: column mismatch " + tk.shape_str() + " vs " +
                      first.shape_str());
    if (axis == 1 && tk.rows() != rows)
      throw TapeError("concat axis 1: row mismatch " + tk.shape_str() + " vs " +
                      first.shape_str());
    if (axis == 0) rows += tk.rows();
    else cols += tk.cols();
  }
  if (axis == 0) {
    rows = 0;
    for (int id : ids) rows += nodes_[id].value.rows();
  }
  Tensor out(rows, cols);
  size_t off = 0;
  for (int id : ids) {
    const Tensor& tk = nodes_[id].value;
    if (axis == 0) {
      std::copy(tk.data.begin(), tk.data.end(), out.data.begin() + off * cols);
      off += tk.rows();
    } else {
      for (size_t i = 0; i < tk.rows(); ++i)
        for (size_t j = 0; j < tk.cols(); ++j) out.at(i, off + j) = tk.at(i, j);
      off += tk.cols();
    }
  }
  Node n;
  n.label = "concat";
  n.inputs = std::move(ids);
  n.value = std::move(out);
  n.backward = [axis](Tape& t, const Tensor& gout, const Node& self) {
    size_t off = 0;
    for (int id : self.inputs) {
      const Tensor& tk = t.nodes_[id].value;
      Tensor g(tk.rows(), tk.cols());
      for (size_t i = 0; i < tk.rows(); ++i)
        for (size_t j = 0; j < tk.cols(); ++j)
          g.at(i, j) = axis == 0 ? gout.at(off + i, j) : gout.at(i, off + j);
      t.accumulate(id, g);
      off += axis == 0 ? tk.rows() : tk.cols();
    }
  };
  return push(std::move(n));
}

Var Tape::slice(Var a, size_t r0, size_t r1, size_t c0, size_t c1) {
  int ia = check(a);
  const Tensor& A = nodes_[ia].value;
  if (r1 > A.rows() || c1 > A.cols() || r0 >= r1 || c0 >= c1)
    throw TapeError("slice: range out of bounds for " + A.shape_str());
  Tensor out(r1 - r0, c1 - c0);
  for (size_t i = r0; i < r1; ++i)
    for (size_t j = c0; j < c1; ++j) out.at(i - r0, j - c0) = A.at(i, j);
  Node n;
  n.label = "slice";
  n.inputs = {ia};
  n.value = std::move(out);
  n.backward = [r0, c0](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& A = t.nodes_[self.inputs[0]].value;
    Tensor g = Tensor::zeros(A.rows(), A.cols());
    for (size_t i = 0; i < gout.rows(); ++i)
      for (size_t j = 0; j < gout.cols(); ++j) g.at(r0 + i, c0 + j) = gout.at(i, j);
    t.accumulate(self.inputs[0], g);
  };
  return push(std::move(n));
}

Var Tape::softmax_lastdim(Var a) {
  int ia = check(a);
  const Tensor& A = nodes_[ia].value;
  Tensor out(A.rows(), A.cols());
  for (size_t i = 0; i < A.rows(); ++i) {
    double mx = A.at(i, 0);
    for (size_t j = 1; j < A.cols(); ++j) mx = std::max(mx, A.at(i, j));
    double denom = 0.0;
    for (size_t j = 0; j < A.cols(); ++j) {
      out.at(i, j) = std::exp(A.at(i, j) - mx);
      denom += out.at(i, j);
    }
    for (size_t j = 0; j < A.cols(); ++j) out.at(i, j) /= denom;
  }
  Node n;
  n.label = "softmax_lastdim";
  n.inputs = {ia};
  n.value = std::move(out);
  macs_ += 3 * A.numel();
  n.backward = [](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& y = self.value;
    Tensor g(y.rows(), y.cols());
    for (size_t i = 0; i < y.rows(); ++i) {
      double dotv = 0.0;
      for (size_t j = 0; j < y.cols(); ++j) dotv += gout.at(i, j) * y.at(i, j);
      for (size_t j = 0; j < y.cols(); ++j)
        g.at(i, j) = y.at(i, j) * (gout.at(i, j) - dotv);
    }
    t.accumulate(self.inputs[0], g);
    t.macs_ += 2 * y.numel();
  };
  return push(std::move(n));
}

Var Tape::layernorm(Var a, Var gamma, Var beta, double eps) {
  int ia = check(a), ig = check(gamma), ib = check(beta);
  const Tensor& A = nodes_[ia].value;
  const Tensor& G = nodes_[ig].value;
  const Tensor& B = nodes_[ib].value;
  if (G.rows() != 1 || G.cols() != A.cols() || B.rows() != 1 || B.cols() != A.cols())
    throw TapeError("layernorm: scale/shift must be 1x" + std::to_string(A.cols()) +
                    ", got " + G.shape_str() + " and " + B.shape_str());
  size_t d = A.cols();
  Tensor out(A.rows(), d);
  Tensor xhat(A.rows(), d);
  std::vector<double> inv_std(A.rows());
  for (size_t i = 0; i < A.rows(); ++i) {
    double mu = 0.0;
    for (size_t j = 0; j < d; ++j) mu += A.at(i, j);
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (size_t j = 0; j < d; ++j) {
      double c = A.at(i, j) - mu;
      var += c * c;
    }
    var /= static_cast<double>(d);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (size_t j = 0; j < d; ++j) {
      xhat.at(i, j) = (A.at(i, j) - mu) * inv_std[i];
      out.at(i, j) = G.at(0, j) * xhat.at(i, j) + B.at(0, j);
    }
  }
  Node n;
  n.label = "layernorm";
  n.inputs = {ia, ig, ib};
  n.value = std::move(out);
  macs_ += 5 * A.numel();
  n.backward = [xhat = std::move(xhat), inv_std = std::move(inv_std)](
                   Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& G = t.nodes_[self.inputs[1]].value;
    size_t rows = gout.rows(), d = gout.cols();
    Tensor gx(rows, d);
    Tensor gg(1, d);
    Tensor gb(1, d);
    for (size_t i = 0; i < rows; ++i) {
      double sum_dxh = 0.0, sum_dxh_xh = 0.0;
      for (size_t j = 0; j < d; ++j) {
        double dxh = gout.at(i, j) * G.at(0, j);
        sum_dxh += dxh;
        sum_dxh_xh += dxh * xhat.at(i, j);
        gg.at(0, j) += gout.at(i, j) * xhat.at(i, j);
        gb.at(0, j) += gout.at(i, j);
      }
      double dd = static_cast<double>(d);
      for (size_t j = 0; j < d; ++j) {
        double dxh = gout.at(i, j) * G.at(0, j);
        gx.at(i, j) = inv_std[i] * (dxh - sum_dxh / dd - xhat.at(i, j) * sum_dxh_xh / dd);
      }
    }
    t.accumulate(self.inputs[0], gx);
    t.accumulate(self.inputs[1], gg);
    t.accumulate(self.inputs[2], gb);
    t.macs_ += 6 * gout.numel();
  };
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  int ia = check(a);
  Tensor out = nodes_[ia].value;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  Node n;
  n.label = "relu";
  n.inputs = {ia};
  n.value = std::move(out);
  macs_ += n.value.numel();
  n.backward = [](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& A = t.nodes_[self.inputs[0]].value;
    Tensor g = gout;
    for (size_t i = 0; i < g.data.size(); ++i)
      if (A.data[i] <= 0.0) g.data[i] = 0.0;
    t.accumulate(self.inputs[0], g);
  };
  return push(std::move(n));
}

Var Tape::exp_op(Var a) {
  int ia = check(a);
  Tensor out = nodes_[ia].value;
  for (double& v : out.data) v = std::exp(v);
  Node n;
  n.label = "exp";
  n.inputs = {ia};
  n.value = std::move(out);
  macs_ += n.value.numel();
  n.backward = [](Tape& t, const Tensor& gout, const Node& self) {
    Tensor g = gout;
    for (size_t i = 0; i < g.data.size(); ++i) g.data[i] *= self.value.data[i];
    t.accumulate(self.inputs[0], g);
  };
  return push(std::move(n));
}

Var Tape::log_op(Var a) {
  int ia = check(a);
  Tensor out = nodes_[ia].value;
  for (double& v : out.data) v = std::log(v);
  Node n;
  n.label = "log";
  n.inputs = {ia};
  n.value = std::move(out);
  macs_ += n.value.numel();
  n.backward = [](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& A = t.nodes_[self.inputs[0]].value;
    Tensor g = gout;
    for (size_t i = 0; i < g.data.size(); ++i) g.data[i] /= A.data[i];
    t.accumulate(self.inputs[0], g);
  };
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  int ia = check(a);
  double s = 0.0;
  for (double v : nodes_[ia].value.data) s += v;
  Node n;
  n.label = "sum";
  n.inputs = {ia};
  n.value = Tensor::scalar(s);
  macs_ += nodes_[ia].value.numel();
  n.backward = [](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& A = t.nodes_[self.inputs[0]].value;
    t.accumulate(self.inputs[0], Tensor::full(A.rows(), A.cols(), gout.data[0]));
  };
  return push(std::move(n));
}

Var Tape::mean(Var a) {
  int ia = check(a);
  const Tensor& A = nodes_[ia].value;
  double s = 0.0;
  for (double v : A.data) s += v;
  double inv = 1.0 / static_cast<double>(A.numel());
  Node n;
  n.label = "mean";
  n.inputs = {ia};
  n.value = Tensor::scalar(s * inv);
  macs_ += A.numel();
  n.backward = [inv](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& A = t.nodes_[self.inputs[0]].value;
    t.accumulate(self.inputs[0], Tensor::full(A.rows(), A.cols(), gout.data[0] * inv));
  };
  return push(std::move(n));
}

Var Tape::l2_normalize(Var a) {
  int ia = check(a);
  const Tensor& A = nodes_[ia].value;
  Tensor out(A.rows(), A.cols());
  std::vector<double> inv_norm(A.rows());
  for (size_t i = 0; i < A.rows(); ++i) {
    double ss = 1e-24;  // keeps the map smooth at the origin
    for (size_t j = 0; j < A.cols(); ++j) ss += A.at(i, j) * A.at(i, j);
    inv_norm[i] = 1.0 / std::sqrt(ss);
    for (size_t j = 0; j < A.cols(); ++j) out.at(i, j) = A.at(i, j) * inv_norm[i];
  }
  Node n;
  n.label = "l2_normalize";
  n.inputs = {ia};
  n.value = std::move(out);
  macs_ += 2 * A.numel();
  n.backward = [inv_norm = std::move(inv_norm)](Tape& t, const Tensor& gout,
                                                const Node& self) {
    const Tensor& A = t.nodes_[self.inputs[0]].value;
    Tensor g(A.rows(), A.cols());
    for (size_t i = 0; i < A.rows(); ++i) {
      double dotv = 0.0;
      for (size_t j = 0; j < A.cols(); ++j) dotv += gout.at(i, j) * A.at(i, j);
      double in3 = inv_norm[i] * inv_norm[i] * inv_norm[i];
      for (size_t j = 0; j < A.cols(); ++j)
        g.at(i, j) = gout.at(i, j) * inv_norm[i] - A.at(i, j) * dotv * in3;
    }
    t.accumulate(self.inputs[0], g);
    t.macs_ += 3 * A.numel();
  };
  return push(std::move(n));
}

Var Tape::dropout_mask_apply(Var a, const Tensor& mask) {
  int ia = check(a);
  const Tensor& A = nodes_[ia].value;
  if (!A.same_shape(mask))
    throw TapeError("dropout_mask_apply: mask " + mask.shape_str() + " vs input " +
                    A.shape_str());
  Tensor out = A;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask.data[i];
  Node n;
  n.label = "dropout_mask_apply";
  n.inputs = {ia};
  n.value = std::move(out);
  macs_ += A.numel();
  n.backward = [mask](Tape& t, const Tensor& gout, const Node& self) {
    Tensor g = gout;
    for (size_t i = 0; i < g.data.size(); ++i) g.data[i] *= mask.data[i];
    t.accumulate(self.inputs[0], g);
  };
  return push(std::move(n));
}

Var Tape::transpose_op(Var a) {
  int ia = check(a);
  Node n;
  n.label = "transpose";
  n.inputs = {ia};
  n.value = transpose(nodes_[ia].value);
  n.backward = [](Tape& t, const Tensor& gout, const Node& self) {
    t.accumulate(self.inputs[0], transpose(gout));
  };
  return push(std::move(n));
}

Var Tape::gather_rows(Var a, const std::vector<size_t>& ids) {
  int ia = check(a);
  const Tensor& A = nodes_[ia].value;
  for (size_t id : ids)
    if (id >= A.rows())
      throw TapeError("gather_rows: row " + std::to_string(id) + " out of range for " +
                      A.shape_str());
  Tensor out(ids.size(), A.cols());
  for (size_t i = 0; i < ids.size(); ++i)
    for (size_t j = 0; j < A.cols(); ++j) out.at(i, j) = A.at(ids[i], j);
  Node n;
  n.label = "gather_rows";
  n.inputs = {ia};
  n.value = std::move(out);
  n.backward = [ids](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& A = t.nodes_[self.inputs[0]].value;
    Tensor g = Tensor::zeros(A.rows(), A.cols());
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = 0; j < gout.cols(); ++j) g.at(ids[i], j) += gout.at(i, j);
    t.accumulate(self.inputs[0], g);
  };
  return push(std::move(n));
}

Var Tape::spike(Var u_minus_thresh, const SurrogateConfig& cfg, SpikeMode mode) {
  int ia = check(u_minus_thresh);
  if (cfg.alpha <= 0.0) throw TapeError("spike: alpha must be positive");
  const Tensor& X = nodes_[ia].value;
  double alpha = cfg.alpha;
  Tensor out(X.rows(), X.cols());
  for (size_t i = 0; i < X.data.size(); ++i)
    out.data[i] = mode == SpikeMode::Hard ? (X.data[i] >= 0.0 ? 1.0 : 0.0)
                                          : soft_spike(X.data[i], alpha);
  Node n;
  n.label = "spike";
  n.inputs = {ia};
  n.value = std::move(out);
  macs_ += X.numel();
  n.backward = [alpha, mode](Tape& t, const Tensor& gout, const Node& self) {
    const Tensor& X = t.nodes_[self.inputs[0]].value;
    Tensor g = gout;
    for (size_t i = 0; i < g.data.size(); ++i)
      g.data[i] *= mode == SpikeMode::Hard ? surrogate_grad(X.data[i], alpha)
                                           : soft_spike_grad(X.data[i], alpha);
    t.accumulate(self.inputs[0], g);
  };
  return push(std::move(n));
}

Var Tape::st_reset(Var u, Var s, double u_reset) {
  int iu = check(u), is = check(s);
  const Tensor& U = nodes_[iu].value;
  const Tensor& S = nodes_[is].value;
  if (!U.same_shape(S))
    throw TapeError("st_reset: shape mismatch " + U.shape_str() + " vs " + S.shape_str());
  Tensor out(U.rows(), U.cols());
  for (size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = (1.0 - S.data[i]) * U.data[i] + S.data[i] * u_reset;
  Node n;
  n.label = "st_reset";
  n.inputs = {iu, is};
  n.value = std::move(out);
  macs_ += U.numel();
  n.backward = [](Tape& t, const Tensor& gout, const Node& self) {
    // detached reset: gradient passes through to the pre-reset membrane,
    // nothing flows into the spike input
    t.accumulate(self.inputs[0], gout);
  };
  return push(std::move(n));
}

}  // namespace chronospike
