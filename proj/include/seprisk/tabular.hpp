#pragma once

#include "seprisk/tabular/clean.hpp"
#include "seprisk/tabular/cohort.hpp"
#include "seprisk/tabular/csv.hpp"
#include "seprisk/tabular/diastolic.hpp"
#include "seprisk/tabular/impute_diastolic.hpp"
#include "seprisk/tabular/interpolate.hpp"
#include "seprisk/tabular/logistic.hpp"
#include "seprisk/tabular/mice.hpp"
#include "seprisk/tabular/normalize.hpp"
#include "seprisk/tabular/prep.hpp"
#include "seprisk/tabular/split.hpp"
#include "seprisk/tabular/time.hpp"
