#pragma once

#include "rml/audits.hpp"
#include "rml/config.hpp"
#include "rml/csv.hpp"
#include "rml/errors.hpp"
#include "rml/kernels.hpp"
#include "rml/laws.hpp"
#include "rml/models.hpp"
#include "rml/moment_params.hpp"
#include "rml/montecarlo.hpp"
#include "rml/numeric_oracle.hpp"
#include "rml/nw_regression.hpp"
#include "rml/parallel.hpp"
#include "rml/processes.hpp"
#include "rml/quadrature.hpp"
#include "rml/ratio.hpp"
#include "rml/report.hpp"
#include "rml/rng.hpp"
