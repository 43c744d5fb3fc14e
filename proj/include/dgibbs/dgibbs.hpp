#pragma once

#include "dgibbs/baselines.hpp"
#include "dgibbs/chart.hpp"
#include "dgibbs/coefficients.hpp"
#include "dgibbs/continuous.hpp"
#include "dgibbs/csv.hpp"
#include "dgibbs/discrete.hpp"
#include "dgibbs/errors.hpp"
#include "dgibbs/field.hpp"
#include "dgibbs/harness/config.hpp"
#include "dgibbs/harness/diagnostics.hpp"
#include "dgibbs/harness/error_curve.hpp"
#include "dgibbs/harness/experiment.hpp"
#include "dgibbs/math.hpp"
#include "dgibbs/pgm.hpp"
#include "dgibbs/phase_curve.hpp"
#include "dgibbs/targets.hpp"
