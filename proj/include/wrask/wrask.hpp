#pragma once

#include "wrask/bench.hpp"
#include "wrask/bregman.hpp"
#include "wrask/core_la.hpp"
#include "wrask/error.hpp"
#include "wrask/generate.hpp"
#include "wrask/matrix_market.hpp"
#include "wrask/problem.hpp"
#include "wrask/report_io.hpp"
#include "wrask/rng.hpp"
#include "wrask/sampling.hpp"
#include "wrask/solver.hpp"
#include "wrask/spectral.hpp"
#include "wrask/theory.hpp"
