#include "voi/models/common.hpp"

namespace voi::models {

Matrix run_focal_mh(const bayes::LogTarget& target, const std::vector<double>& init,
                    const std::vector<double>& proposal_sd, std::size_t count, std::size_t burn_in, Rng& rng,
                    const std::string& who) {
  bayes::MhConfig config;
  config.burn_in = burn_in;
  config.steps = burn_in + count;
  config.proposal_sd = proposal_sd;
  config.compute_ess = false;
  auto result = bayes::mh_sample(target, init, config, rng);
  if (!result.converged()) {
    std::string msg = who + " posterior sampler did not converge:";
    for (const auto& w : result.warnings) msg += " " + w + ";";
    throw ConvergenceError(msg);
  }
  return std::move(result.chain);
}

PsaSet with_focal(const PsaSet& draws, const Matrix& phi) {
  Matrix out = draws.draws();
  const auto& focal = draws.focal();
  for (std::size_t c = 0; c < focal.size(); ++c)
    out.col(static_cast<Eigen::Index>(focal[c])) = phi.col(static_cast<Eigen::Index>(c));
  return PsaSet{std::move(out), draws.names(), focal};
}

}  // namespace voi::models
