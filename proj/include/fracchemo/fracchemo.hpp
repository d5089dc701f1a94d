#pragma once

#include "fracchemo/errors.hpp"
#include "fracchemo/grid.hpp"
#include "fracchemo/params.hpp"
#include "fracchemo/operators.hpp"
#include "fracchemo/kernel.hpp"
#include "fracchemo/diagnostics.hpp"
#include "fracchemo/integrator.hpp"
#include "fracchemo/oracle.hpp"
#include "fracchemo/audits.hpp"
#include "fracchemo/config.hpp"
#include "fracchemo/csv.hpp"
#include "fracchemo/checkpoint.hpp"
#include "fracchemo/report.hpp"
#include "fracchemo/svg.hpp"
#include "fracchemo/simulate.hpp"
#include "fracchemo/sweep.hpp"
#include "fracchemo/suites.hpp"
