#pragma once

// Data, model specifications, chain state and retained draws.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sphreg/distributions.hpp"
#include "sphreg/sph_model.hpp"

namespace sphreg {

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedOperation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> names;  // predictor names, may be empty

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return X.cols(); }

  void validate() const {
    if (X.rows() != y.size()) {
      throw std::invalid_argument("dataset: X has " + std::to_string(X.rows()) + " rows but y has " +
                                  std::to_string(y.size()));
    }
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != X.cols()) {
      throw std::invalid_argument("dataset: predictor name count does not match X");
    }
  }

  /// Rows whose index is not in drop (drop must be sorted ascending).
  Dataset without_rows(const std::vector<Eigen::Index>& drop) const {
    Dataset out;
    const Eigen::Index keep = n() - static_cast<Eigen::Index>(drop.size());
    out.y.resize(keep);
    out.X.resize(keep, p());
    out.names = names;
    std::size_t d = 0;
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n(); ++i) {
      if (d < drop.size() && drop[d] == i) {
        ++d;
        continue;
      }
      out.y(k) = y(i);
      out.X.row(k) = X.row(i);
      ++k;
    }
    return out;
  }
};

/// Settings shared by both priors: error model, intercept, global scale, alpha^2 prior.
struct ErrorModelSpec {
  LossKind loss = LossKind::SPH;
  bool include_intercept = true;
  double tau_mu2 = 1e4;
  bool include_sigma = false;
  double a_sigma = 0.01;
  double b_sigma = 0.01;
  bool alpha_prior = true;
  double a_alpha = 0.01;
  double b_alpha = 0.01;

  /// L2 always carries a common variance, stored in sigma2 with lambda_i = 1.
  bool sigma_active() const { return include_sigma || loss == LossKind::L2; }
  bool alpha_active() const { return loss == LossKind::SPH || loss == LossKind::UnscaledPH; }

  void validate_common() const {
    if (loss == LossKind::Huber) throw std::invalid_argument("huber loss has no sampler; use sph, uph, l1 or l2");
    if (!(tau_mu2 > 0.0)) throw std::invalid_argument("tau_mu2 must be positive");
    if (!(a_sigma > 0.0) || !(b_sigma > 0.0)) throw std::invalid_argument("a_sigma and b_sigma must be positive");
    if (alpha_prior && (!(a_alpha > 0.0) || !(b_alpha > 0.0))) {
      throw std::invalid_argument("a_alpha and b_alpha must be positive");
    }
  }
};

/// Gaussian prior beta ~ N(beta0, sigma^2 Q^{-1}).
struct RidgeSpec : ErrorModelSpec {
  Eigen::VectorXd beta0;  // empty means zeros
  Eigen::MatrixXd Q;      // empty means prior_precision * I
  double prior_precision = 0.01;

  Eigen::VectorXd beta0_or_default(Eigen::Index p) const {
    return beta0.size() == 0 ? Eigen::VectorXd::Zero(p) : beta0;
  }
  Eigen::MatrixXd Q_or_default(Eigen::Index p) const {
    return Q.size() == 0 ? Eigen::MatrixXd(prior_precision * Eigen::MatrixXd::Identity(p, p)) : Q;
  }

  void validate(Eigen::Index p) const {
    validate_common();
    if (beta0.size() != 0 && beta0.size() != p) throw std::invalid_argument("beta0 length does not match p");
    if (Q.size() != 0) {
      if (Q.rows() != p || Q.cols() != p) throw std::invalid_argument("Q must be p x p");
      if (!Q.isApprox(Q.transpose(), 1e-12)) throw std::invalid_argument("Q must be symmetric");
      Eigen::LLT<Eigen::MatrixXd> llt(Q);
      if (llt.info() != Eigen::Success) throw std::invalid_argument("Q must be positive definite");
    } else if (!(prior_precision > 0.0)) {
      throw std::invalid_argument("prior_precision must be positive");
    }
  }
};

enum class UpdateOrder { Fixed, Shuffled };

/// Spike-and-slab prior: gamma_j ~ Bernoulli(q), beta_j | gamma_j = 1 ~ N(0, tau2 [* sigma^2]),
/// q ~ Beta(a_q, b_q).
struct SpikeSlabSpec : ErrorModelSpec {
  double tau2 = 1e4;
  double a_q = 1.0;
  double b_q = 1.0;
  UpdateOrder update_order = UpdateOrder::Fixed;

  void validate(Eigen::Index /*p*/) const {
    validate_common();
    if (!(tau2 > 0.0)) throw std::invalid_argument("tau2 must be positive");
    if (!(a_q > 0.0) || !(b_q > 0.0)) throw std::invalid_argument("a_q and b_q must be positive");
  }
};

enum class PriorKind { Ridge, SpikeSlab };

inline std::string_view to_string(PriorKind k) { return k == PriorKind::Ridge ? "ridge" : "spike_slab"; }

struct ModelSpec {
  PriorKind prior = PriorKind::Ridge;
  RidgeSpec ridge;
  SpikeSlabSpec spike_slab;

  const ErrorModelSpec& common() const {
    return prior == PriorKind::Ridge ? static_cast<const ErrorModelSpec&>(ridge)
                                     : static_cast<const ErrorModelSpec&>(spike_slab);
  }
  ErrorModelSpec& common() {
    return prior == PriorKind::Ridge ? static_cast<ErrorModelSpec&>(ridge) : static_cast<ErrorModelSpec&>(spike_slab);
  }
  LossKind loss() const { return common().loss; }
};

inline ModelSpec with_loss(ModelSpec m, LossKind k) {
  m.ridge.loss = k;
  m.spike_slab.loss = k;
  return m;
}

/// One state of the chain. gamma and q are only used by the spike-and-slab sampler.
struct ChainState {
  Eigen::VectorXd beta;
  double mu = 0.0;
  Eigen::VectorXd lambda;
  double sigma2 = 1.0;
  double alpha2 = 1.0;
  Eigen::VectorXi gamma;
  double q = 0.5;

  void check_invariants() const {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw SamplerError("sigma2 left (0, inf)");
    if (!(alpha2 > 0.0) || !std::isfinite(alpha2)) throw SamplerError("alpha2 left (0, inf)");
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (!(lambda(i) > 0.0) || !std::isfinite(lambda(i))) {
        throw SamplerError("lambda[" + std::to_string(i) + "] left (0, inf)");
      }
    }
    if (!beta.allFinite() || !std::isfinite(mu)) throw SamplerError("non-finite beta or mu");
  }
};

using SparsityState = ChainState;

struct McmcConfig {
  std::int64_t n_burnin = 5000;
  std::int64_t n_draws = 10000;
  double slice_width = 1.0;
  int slice_max_steps = 50;
  double jitter_start = 1e-10;
  double jitter_max = 1e-4;
  std::uint64_t seed = 0;
  bool record_lambda = true;
  // hold blocks at their initial values
  bool fix_lambda = false;
  bool fix_sigma2 = false;
  bool fix_alpha2 = false;

  JitterPolicy jitter() const { return {jitter_start, jitter_max}; }

  void validate() const {
    if (n_draws < 1) throw std::invalid_argument("n_draws must be at least 1");
    if (n_burnin < 0) throw std::invalid_argument("n_burnin must be non-negative");
    if (!(slice_width > 0.0)) throw std::invalid_argument("slice_width must be positive");
    if (slice_max_steps < 0) throw std::invalid_argument("slice_max_steps must be non-negative");
    if (!(jitter_start > 0.0) || jitter_max < jitter_start) throw std::invalid_argument("bad jitter range");
  }
};

/// Retained draws, one row per iteration.
struct PosteriorDraws {
  Eigen::MatrixXd beta;    // draws x p
  Eigen::VectorXd mu;      // draws
  Eigen::VectorXd sigma2;  // draws
  Eigen::VectorXd alpha2;  // draws
  Eigen::MatrixXd lambda;  // draws x n, empty unless recorded
  Eigen::MatrixXi gamma;   // draws x p, spike-and-slab only
  Eigen::VectorXd q;       // draws, spike-and-slab only
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::int64_t n_burnin = 0;
  LossKind loss = LossKind::SPH;
  PriorKind prior = PriorKind::Ridge;
  bool has_intercept = true;
  bool has_sigma = false;

  Eigen::Index n_draws() const { return beta.rows(); }
  bool has_lambda() const { return lambda.size() > 0; }

  Eigen::VectorXd beta_mean() const { return beta.colwise().mean().transpose(); }

  /// Posterior covariance of beta (divisor draws - 1).
  Eigen::MatrixXd beta_cov() const {
    const Eigen::MatrixXd c = beta.rowwise() - beta.colwise().mean();
    const double denom = std::max<double>(1.0, static_cast<double>(beta.rows()) - 1.0);
    return c.transpose() * c / denom;
  }

  Eigen::VectorXd inclusion_prob() const {
    if (gamma.size() == 0) return Eigen::VectorXd::Ones(beta.cols());
    return gamma.cast<double>().colwise().mean().transpose();
  }

  bool operator==(const PosteriorDraws& o) const {
    return beta == o.beta && mu == o.mu && sigma2 == o.sigma2 && alpha2 == o.alpha2 && lambda == o.lambda &&
           gamma == o.gamma && q == o.q && seed == o.seed && stream_id == o.stream_id;
  }
};

}  // namespace sphreg
