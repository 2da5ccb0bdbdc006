#pragma once

#include "seprisk/interpret/export.hpp"
#include "seprisk/interpret/histogram.hpp"
#include "seprisk/interpret/ranking.hpp"
#include "seprisk/interpret/risk_curve.hpp"
