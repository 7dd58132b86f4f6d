#pragma once

#include "tarlev/error.hpp"
#include "tarlev/format.hpp"

#include "tarlev/core/bivariate_normal.hpp"
#include "tarlev/core/json.hpp"
#include "tarlev/core/moments.hpp"
#include "tarlev/core/regime_probs.hpp"
#include "tarlev/core/simulate.hpp"
#include "tarlev/core/stationarity.hpp"
#include "tarlev/core/types.hpp"

#include "tarlev/stats/descriptive.hpp"
#include "tarlev/stats/distributions.hpp"
#include "tarlev/stats/ols.hpp"

#include "tarlev/inference/diagnostics.hpp"
#include "tarlev/inference/gibbs.hpp"
#include "tarlev/inference/identify.hpp"
#include "tarlev/inference/likelihood.hpp"
#include "tarlev/inference/nonlinearity.hpp"
#include "tarlev/inference/report.hpp"

#include "tarlev/leverage/leverage.hpp"

#include "tarlev/optim/bfgs.hpp"

#include "tarlev/bekk/asymmetry.hpp"
#include "tarlev/bekk/fit.hpp"
#include "tarlev/bekk/model.hpp"
#include "tarlev/bekk/nis.hpp"

#include "tarlev/io/csv.hpp"
#include "tarlev/io/experiment.hpp"
#include "tarlev/io/ingest.hpp"
#include "tarlev/io/manifest.hpp"
#include "tarlev/io/presets.hpp"
