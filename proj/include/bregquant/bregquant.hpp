#pragma once

#include "bregquant/distortion.hpp"
#include "bregquant/distribution.hpp"
#include "bregquant/divergence.hpp"
#include "bregquant/errors.hpp"
#include "bregquant/geometry1d.hpp"
#include "bregquant/quadrature.hpp"
#include "bregquant/quant2d.hpp"
#include "bregquant/sampling.hpp"
#include "bregquant/solver.hpp"
#include "bregquant/tridiagonal.hpp"
#include "bregquant/verify.hpp"
