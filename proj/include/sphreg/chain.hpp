#pragma once

// Burn-in plus retention driver for both priors.

#include <exception>
#include <optional>
#include <string>

#include "sphreg/model.hpp"
#include "sphreg/rng.hpp"
#include "sphreg/sampler_core.hpp"
#include "sphreg/spike_slab.hpp"

namespace sphreg {

inline ChainState initialize(const Dataset& d, const ModelSpec& spec) {
  return spec.prior == PriorKind::Ridge ? initialize_ridge(d, spec.ridge) : initialize_spike_slab(d, spec.spike_slab);
}

inline void gibbs_step(ChainState& s, const Dataset& d, const ModelSpec& spec, const McmcConfig& cfg, RngStream& rng) {
  if (spec.prior == PriorKind::Ridge) {
    gibbs_step_ridge(s, d, spec.ridge, cfg, rng);
  } else {
    gibbs_step_spike_slab(s, d, spec.spike_slab, cfg, rng);
  }
}

/// Runs n_burnin + n_draws sweeps from init (or the default start) and keeps the last n_draws.
inline PosteriorDraws run_chain(const Dataset& d, const ModelSpec& spec, const McmcConfig& cfg, RngStream& rng,
                                std::optional<ChainState> init = std::nullopt) {
  d.validate();
  cfg.validate();
  if (spec.prior == PriorKind::Ridge) {
    spec.ridge.validate(d.p());
  } else {
    spec.spike_slab.validate(d.p());
  }
  const ErrorModelSpec& common = spec.common();
  ChainState s = init ? *init : initialize(d, spec);
  if (spec.prior == PriorKind::SpikeSlab && s.gamma.size() != d.p()) {
    s.gamma = Eigen::VectorXi::Zero(d.p());
    for (Eigen::Index j = 0; j < d.p(); ++j) s.gamma(j) = s.beta(j) != 0.0 ? 1 : 0;
  }

  const Eigen::Index m = static_cast<Eigen::Index>(cfg.n_draws);
  PosteriorDraws out;
  out.beta.resize(m, d.p());
  out.mu.resize(m);
  out.sigma2.resize(m);
  out.alpha2.resize(m);
  if (cfg.record_lambda) out.lambda.resize(m, d.n());
  if (spec.prior == PriorKind::SpikeSlab) {
    out.gamma.resize(m, d.p());
    out.q.resize(m);
  }
  out.seed = rng.seed();
  out.stream_id = rng.stream_id();
  out.n_burnin = cfg.n_burnin;
  out.loss = common.loss;
  out.prior = spec.prior;
  out.has_intercept = common.include_intercept;
  out.has_sigma = common.sigma_active();

  const std::int64_t total = cfg.n_burnin + cfg.n_draws;
  for (std::int64_t it = 0; it < total; ++it) {
    try {
      gibbs_step(s, d, spec, cfg, rng);
      s.check_invariants();
    } catch (const std::exception& e) {
      throw SamplerError("iteration " + std::to_string(it) + ": " + e.what());
    }
    if (it < cfg.n_burnin) continue;
    const Eigen::Index k = static_cast<Eigen::Index>(it - cfg.n_burnin);
    out.beta.row(k) = s.beta.transpose();
    out.mu(k) = s.mu;
    out.sigma2(k) = common.sigma_active() ? s.sigma2 : 1.0;
    out.alpha2(k) = s.alpha2;
    if (cfg.record_lambda) out.lambda.row(k) = s.lambda.transpose();
    if (spec.prior == PriorKind::SpikeSlab) {
      out.gamma.row(k) = s.gamma.transpose();
      out.q(k) = s.q;
    }
  }
  return out;
}

}  // namespace sphreg
