#pragma once

#include "wrask/core_la.hpp"

#include <optional>

namespace wrask {

/// A linear system A x = b with the regularization weight used to solve it.
struct Problem {
    RowMatrix a;
    Vector b;
    std::optional<Vector> x_hat;        // ground truth, when known
    double lambda = 1.0;
    std::optional<double> noise_delta;  // ||b - A x_hat||_{p+2} <= noise_delta
    bool normalized = false;            // rows of `a` already have unit 2-norm
};

}  // namespace wrask
