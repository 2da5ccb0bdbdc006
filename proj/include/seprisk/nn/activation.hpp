#pragma once

#include <algorithm>

#include "seprisk/math.hpp"
#include "seprisk/nn/tensor.hpp"

namespace seprisk::nn {

enum class Activation { none, relu, sigmoid };

inline Tensor relu(Tensor x) {
  for (double& v : x.data()) v = std::max(v, 0.0);
  return x;
}

// Gradient through ReLU given its output; zero slope at the kink.
inline Tensor relu_backward(const Tensor& out, Tensor grad) {
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (out[i] <= 0.0) grad[i] = 0.0;
  return grad;
}

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::relu: return std::max(z, 0.0);
    case Activation::sigmoid: return sigmoid(z);
    case Activation::none: break;
  }
  return z;
}

// d(activation)/dz expressed in terms of the activation output.
inline double activation_slope(Activation a, double out) {
  switch (a) {
    case Activation::relu: return out > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return out * (1.0 - out);
    case Activation::none: break;
  }
  return 1.0;
}

}  // namespace seprisk::nn
