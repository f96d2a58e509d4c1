#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chronospike/tensor.hpp"

namespace chronospike {

// Surrogate gradient config: sigma'(x; alpha) = alpha / (alpha*|x| + 1)^2.
struct SurrogateConfig {
  double alpha = 1.0;
};

enum class SpikeMode { Hard, Soft };

double surrogate_grad(double x, double alpha);  // fast-sigmoid derivative form
double soft_spike(double x, double alpha);      // logistic forward for soft mode
double soft_spike_grad(double x, double alpha); // its true derivative

struct TapeError : std::runtime_error {
  explicit TapeError(const std::string& msg) : std::runtime_error(msg) {}
};

class Tape;

// Lightweight handle to a recorded value. Ops are free functions below.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
  bool valid() const { return tape != nullptr && id >= 0; }
};

// Reverse-mode differentiation record. Single-owner: one thread records,
// runs backward once, then the tape is discarded or cleared. Values of a
// finished tape may be copied out freely.
class Tape {
 public:
  explicit Tape(bool record_grads = true) : record_(record_grads) {}

  Var leaf(Tensor value, std::string name = "");
  // a leaf that never receives gradients (masks, one-hot selectors, inputs)
  Var constant(Tensor value, std::string name = "");

  const Tensor& value(Var v) const { return nodes_.at(check(v)).value; }
  // gradient of the last backward() w.r.t. any recorded node; zero tensor
  // for leaves the loss never touched
  Tensor grad(Var v) const;

  void backward(Var loss);
  bool backward_was_run() const { return backward_done_; }
  void clear();

  size_t size() const { return nodes_.size(); }
  bool recording() const { return record_; }
  uint64_t macs() const { return macs_; }
  void add_macs(uint64_t n) { macs_ += n; }

  // --- recorded operations ---
  Var matmul(Var a, Var b);
  Var add(Var a, Var b);            // same shape, or row-vector broadcast
  Var mul(Var a, Var b);            // elementwise, same broadcast rules
  Var scale(Var a, double mult, double shift = 0.0);
  Var concat(const std::vector<Var>& parts, int axis);
  Var slice(Var a, size_t r0, size_t r1, size_t c0, size_t c1);
  Var softmax_lastdim(Var a);
  Var layernorm(Var a, Var gamma, Var beta, double eps = 1e-5);
  Var relu(Var a);
  Var exp_op(Var a);
  Var log_op(Var a);
  Var sum(Var a);
  Var mean(Var a);
  Var l2_normalize(Var a);          // per row; smooth guarded norm
  Var dropout_mask_apply(Var a, const Tensor& mask);
  Var transpose_op(Var a);
  Var gather_rows(Var a, const std::vector<size_t>& ids);
  Var spike(Var u_minus_thresh, const SurrogateConfig& cfg, SpikeMode mode);
  // straight-through reset: forward (1-s)*u + s*u_reset, backward passes
  // grad unchanged to u and nothing to s (Theorem 3 convention)
  Var st_reset(Var u, Var s, double u_reset);

 private:
  struct Node {
    std::string label;
    std::vector<int> inputs;
    Tensor value;
    std::function<void(Tape&, const Tensor&, const Node&)> backward;
    bool grad_target = true;  // constants opt out
  };

  int check(Var v) const {
    if (v.tape != this) throw TapeError("var belongs to a different tape");
    if (v.id < 0 || static_cast<size_t>(v.id) >= nodes_.size())
      throw TapeError("var id out of range");
    return v.id;
  }
  Var push(Node n);
  void accumulate(int id, const Tensor& contrib);
  static void check_finite(const Tensor& t, const std::string& label);

  std::vector<Node> nodes_;
  std::vector<std::optional<Tensor>> grads_;
  bool record_;
  bool backward_done_ = false;
  uint64_t macs_ = 0;
};

// convenience free functions (assert both vars share a tape)
inline Tape& tape_of(Var a) {
  if (!a.valid()) throw TapeError("invalid var");
  return *a.tape;
}
inline Var matmul(Var a, Var b) { return tape_of(a).matmul(a, b); }
inline Var add(Var a, Var b) { return tape_of(a).add(a, b); }
inline Var mul(Var a, Var b) { return tape_of(a).mul(a, b); }
inline Var scale(Var a, double m, double s = 0.0) { return tape_of(a).scale(a, m, s); }
inline Var softmax_lastdim(Var a) { return tape_of(a).softmax_lastdim(a); }
inline Var relu(Var a) { return tape_of(a).relu(a); }
inline Var tsum(Var a) { return tape_of(a).sum(a); }
inline Var tmean(Var a) { return tape_of(a).mean(a); }

}  // namespace chronospike
