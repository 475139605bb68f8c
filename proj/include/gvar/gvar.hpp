#pragma once

// Umbrella header for the whole library.

#include "gvar/backtest.hpp"
#include "gvar/benchmarks.hpp"
#include "gvar/calibration.hpp"
#include "gvar/data/csv.hpp"
#include "gvar/distributions.hpp"
#include "gvar/errors.hpp"
#include "gvar/estimation.hpp"
#include "gvar/evt.hpp"
#include "gvar/forecast.hpp"
#include "gvar/garch.hpp"
#include "gvar/gnormal.hpp"
#include "gvar/pde.hpp"
#include "gvar/report.hpp"
