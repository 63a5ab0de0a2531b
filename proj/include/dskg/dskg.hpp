#pragma once

// Umbrella header.

#include "dskg/config.hpp"
#include "dskg/errors.hpp"
#include "dskg/evolution.hpp"
#include "dskg/fft.hpp"
#include "dskg/field.hpp"
#include "dskg/kernels.hpp"
#include "dskg/output.hpp"
#include "dskg/parallel.hpp"
#include "dskg/quadrature.hpp"
#include "dskg/runner.hpp"
#include "dskg/semilinear.hpp"
#include "dskg/specfun.hpp"
#include "dskg/transform.hpp"
#include "dskg/verify.hpp"
