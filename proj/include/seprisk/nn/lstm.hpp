#pragma once

#include <cmath>
#include <string>

#include "seprisk/math.hpp"
#include "seprisk/nn/init.hpp"
#include "seprisk/nn/tensor.hpp"

namespace seprisk::nn {

struct LstmCache {
  Tensor input;   // [T, D]
  Tensor gates;   // [T, 4H], post-activation, order i f g o
  Tensor cell;    // [T, H]
  Tensor hidden;  // [T, H]
};

struct LstmOutput {
  Tensor sequence;                // [T, H] hidden state per step
  std::vector<double> final_cell; // c_T
};

// Single LSTM layer, zero initial state. Gate layout i, f, g (candidate), o.
class Lstm {
 public:
  Lstm() = default;
  Lstm(std::string name, std::size_t input_dim, std::size_t hidden)
      : in_(input_dim),
        hidden_(hidden),
        kernel_(name + ".kernel", 4 * hidden * input_dim),
        recurrent_(name + ".recurrent", 4 * hidden * hidden),
        bias_(name + ".bias", 4 * hidden) {}

  static std::size_t param_count(std::size_t input_dim, std::size_t hidden) {
    return 4 * ((input_dim + hidden) * hidden + hidden);
  }

  std::size_t input_dim() const { return in_; }
  std::size_t hidden() const { return hidden_; }
  std::vector<Param*> params() { return {&kernel_, &recurrent_, &bias_}; }
  Param& kernel() { return kernel_; }
  Param& recurrent() { return recurrent_; }
  Param& bias() { return bias_; }

  void init(Rng& rng) {
    glorot_uniform(kernel_.value, in_, 4 * hidden_, rng);
    glorot_uniform(recurrent_.value, hidden_, 4 * hidden_, rng);
    std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
    for (std::size_t j = 0; j < hidden_; ++j) bias_.value[hidden_ + j] = 1.0;
  }

  LstmOutput forward(const Tensor& x, LstmCache* cache = nullptr) const {
    require(x.rank() == 2 && x.dim(1) == in_,
            "lstm: expected [T," + std::to_string(in_) + "] input, got " + shape_string(x.shape()));
    const std::size_t steps = x.dim(0), H = hidden_;
    require(steps > 0, "lstm: empty sequence");
    Tensor gates({steps, 4 * H}), cell({steps, H}), hid({steps, H});
    std::vector<double> h_prev(H, 0.0), c_prev(H, 0.0), z(4 * H);
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t r = 0; r < 4 * H; ++r) {
        double s = bias_.value[r];
        const double* wr = &kernel_.value[r * in_];
        for (std::size_t d = 0; d < in_; ++d) s += wr[d] * x.at(t, d);
        const double* ur = &recurrent_.value[r * H];
        for (std::size_t k = 0; k < H; ++k) s += ur[k] * h_prev[k];
        z[r] = s;
      }
      for (std::size_t j = 0; j < H; ++j) {
        const double ig = sigmoid(z[j]);
        const double fg = sigmoid(z[H + j]);
        const double gg = std::tanh(z[2 * H + j]);
        const double og = sigmoid(z[3 * H + j]);
        const double c = fg * c_prev[j] + ig * gg;
        const double h = og * std::tanh(c);
        gates.at(t, j) = ig;
        gates.at(t, H + j) = fg;
        gates.at(t, 2 * H + j) = gg;
        gates.at(t, 3 * H + j) = og;
        cell.at(t, j) = c;
        hid.at(t, j) = h;
      }
      for (std::size_t j = 0; j < H; ++j) {
        h_prev[j] = hid.at(t, j);
        c_prev[j] = cell.at(t, j);
      }
    }
    LstmOutput out{hid, c_prev};
    if (cache) {
      cache->input = x;
      cache->gates = std::move(gates);
      cache->cell = std::move(cell);
      cache->hidden = std::move(hid);
    }
    return out;
  }

  // Backpropagation through time. grad_seq is dL/dh_t for every step
  // (zero rows where a step's output is unused). Returns dL/dx.
  Tensor backward(const LstmCache& cache, const Tensor& grad_seq) {
    const std::size_t steps = cache.input.dim(0), H = hidden_;
    require(grad_seq.shape() == Shape({steps, H}), "lstm: gradient shape mismatch");
    Tensor gx({steps, in_});
    std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0), dz(4 * H);
    for (std::size_t t = steps; t-- > 0;) {
      for (std::size_t j = 0; j < H; ++j) {
        const double ig = cache.gates.at(t, j);
        const double fg = cache.gates.at(t, H + j);
        const double gg = cache.gates.at(t, 2 * H + j);
        const double og = cache.gates.at(t, 3 * H + j);
        const double c = cache.cell.at(t, j);
        const double c_prev = t > 0 ? cache.cell.at(t - 1, j) : 0.0;
        const double tc = std::tanh(c);
        const double dh = grad_seq.at(t, j) + dh_next[j];
        const double dc = dh * og * (1.0 - tc * tc) + dc_next[j];
        dz[j] = dc * gg * ig * (1.0 - ig);
        dz[H + j] = dc * c_prev * fg * (1.0 - fg);
        dz[2 * H + j] = dc * ig * (1.0 - gg * gg);
        dz[3 * H + j] = dh * tc * og * (1.0 - og);
        dc_next[j] = dc * fg;
      }
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      for (std::size_t r = 0; r < 4 * H; ++r) {
        const double g = dz[r];
        bias_.grad[r] += g;
        double* wr = &kernel_.grad[r * in_];
        const double* wv = &kernel_.value[r * in_];
        for (std::size_t d = 0; d < in_; ++d) {
          wr[d] += g * cache.input.at(t, d);
          gx.at(t, d) += g * wv[d];
        }
        if (t > 0) {
          double* ur = &recurrent_.grad[r * H];
          const double* uv = &recurrent_.value[r * H];
          for (std::size_t k = 0; k < H; ++k) {
            ur[k] += g * cache.hidden.at(t - 1, k);
            dh_next[k] += g * uv[k];
          }
        }
      }
    }
    return gx;
  }

 private:
  std::size_t in_ = 0;
  std::size_t hidden_ = 0;
  Param kernel_;
  Param recurrent_;
  Param bias_;
};

}  // namespace seprisk::nn
