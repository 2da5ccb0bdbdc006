#pragma once

#include "seprisk/nn/activation.hpp"
#include "seprisk/nn/batch_norm.hpp"
#include "seprisk/nn/conv2d.hpp"
#include "seprisk/nn/dense.hpp"
#include "seprisk/nn/grad_check.hpp"
#include "seprisk/nn/loss.hpp"
#include "seprisk/nn/lstm.hpp"
#include "seprisk/nn/max_pool.hpp"
#include "seprisk/nn/rmsprop.hpp"
#include "seprisk/nn/tensor.hpp"
