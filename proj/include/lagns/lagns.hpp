#pragma once

#include "fft.hpp"
#include "spectral_field.hpp"
#include "lp_besov.hpp"
#include "trajectory.hpp"
#include "model.hpp"
#include "transforms.hpp"
#include "linear_propagator.hpp"
#include "solver.hpp"
