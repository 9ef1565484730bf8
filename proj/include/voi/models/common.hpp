#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "voi/bayes.hpp"
#include "voi/core.hpp"

namespace voi::models {

// x * log(p) with 0 * log(0) = 0.
inline double xlogy(double x, double p) { return x == 0.0 ? 0.0 : x * std::log(p); }

// Runs the componentwise MH sampler on a transformed focal vector and returns
// `count` kept draws. Throws ConvergenceError naming `who` when the sampler's
// acceptance diagnostic fails.
Matrix run_focal_mh(const bayes::LogTarget& target, const std::vector<double>& init,
                    const std::vector<double>& proposal_sd, std::size_t count, std::size_t burn_in, Rng& rng,
                    const std::string& who);

// Replaces the focal columns of `draws` with the rows of `phi`.
PsaSet with_focal(const PsaSet& draws, const Matrix& phi);

}  // namespace voi::models
