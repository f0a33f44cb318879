#pragma once

#include "harness/config.hpp"
#include "harness/datum.hpp"
#include "harness/experiments.hpp"
#include "harness/fit.hpp"
#include "harness/ode_oracle.hpp"
#include "harness/report.hpp"
