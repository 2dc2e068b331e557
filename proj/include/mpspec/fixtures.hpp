#pragma once

// Built-in example problems.

#include "mpspec/pencil.hpp"

#include <string>
#include <vector>

namespace mpspec {

/// 3 x 2 two-parameter pencil with eigenvalues (1, 2), (3, 1), (1, 1).
MultiParamPencil running_example();

/// 3 x 2 two-parameter pencil with three real eigenvalues of varied conditioning.
MultiParamPencil second_example();

/// Hankel-structured 3 x 2 two-parameter pencil that is right definite
/// (coefficients given to four digits).
MultiParamPencil hankel_example();

/// Output sequence for the second-order realization problem.
RVector realization_data();
constexpr int realization_order = 2;

/// Writes running.json, second.json, hankel.json and realization.csv into
/// `dir` (created if missing); returns the written paths.
std::vector<std::string> install_examples(const std::string& dir);

}  // namespace mpspec
