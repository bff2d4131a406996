#pragma once

// Evaluation functionals for simulated fits.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "sphreg/model.hpp"
#include "sphreg/stats.hpp"

namespace sphreg {

enum class IntervalMethod { EquiTailed, SandwichNormal };

struct IntervalEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.9;
  IntervalMethod method = IntervalMethod::EquiTailed;

  bool covers(double x) const { return lower <= x && x <= upper; }
  double length() const { return upper - lower; }
};

/// M_j = mean over draws of (beta_j - beta_true_j)^2.
inline Eigen::VectorXd posterior_mse(const PosteriorDraws& draws, const Eigen::VectorXd& beta_true) {
  if (draws.beta.cols() != beta_true.size()) throw std::invalid_argument("posterior_mse: dimension mismatch");
  return (draws.beta.rowwise() - beta_true.transpose()).array().square().colwise().mean().transpose();
}

/// M_i = mean over draws of (y_i - mu - x_i'beta)^2 on the test rows.
inline Eigen::VectorXd prediction_mse(const PosteriorDraws& draws, const Dataset& test) {
  if (test.X.cols() != draws.beta.cols()) throw std::invalid_argument("prediction_mse: dimension mismatch");
  if (test.X.rows() != test.y.size()) throw std::invalid_argument("prediction_mse: test X and y disagree");
  // draws x n_test matrix of fitted values
  Eigen::MatrixXd fitted = draws.beta * test.X.transpose();
  fitted.colwise() += draws.mu;
  Eigen::MatrixXd err = (-fitted).rowwise() + test.y.transpose();
  return err.array().square().colwise().mean().transpose();
}

/// Equi-tailed interval from the draws of beta_j.
inline IntervalEstimate credible_interval(const PosteriorDraws& draws, Eigen::Index j, double level) {
  if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("credible_interval: level must be in (0, 1]");
  std::vector<double> x(draws.beta.col(j).data(), draws.beta.col(j).data() + draws.beta.rows());
  std::sort(x.begin(), x.end());
  const double tail = 0.5 * (1.0 - level);
  return {quantile_sorted(x, tail), quantile_sorted(x, 1.0 - tail), level, IntervalMethod::EquiTailed};
}

/// V_n = (1/sigma2) var * XtX * var, symmetrized.
inline Eigen::MatrixXd sandwich_matrix(const Eigen::MatrixXd& var, const Eigen::MatrixXd& xtx, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sandwich: sigma2 must be positive");
  Eigen::MatrixXd v = var * xtx * var / sigma2;
  v = 0.5 * (v + v.transpose()).eval();
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  if (v.size() > 0) {
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(v, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (min_eig < -1e-8 * scale) throw std::runtime_error("sandwich: V_n is not positive semidefinite");
  }
  return v;
}

/// Cross-product of the design, centered when the fit carried an intercept.
inline Eigen::MatrixXd design_crossprod(const Dataset& d, bool center) {
  if (!center) return d.X.transpose() * d.X;
  const Eigen::MatrixXd xc = d.X.rowwise() - d.X.colwise().mean();
  return xc.transpose() * xc;
}

inline Eigen::MatrixXd sandwich_cov(const PosteriorDraws& draws, const Dataset& d, double sigma2) {
  return sandwich_matrix(draws.beta_cov(), design_crossprod(d, draws.has_intercept), sigma2);
}

/// Normal interval centered at E(beta_j | data) with sd sqrt(V_n[j,j]).
inline IntervalEstimate sandwich_interval(const PosteriorDraws& draws, const Dataset& d, double sigma2,
                                          Eigen::Index j, double level) {
  const Eigen::MatrixXd v = sandwich_cov(draws, d, sigma2);
  const double center = draws.beta.col(j).mean();
  const double sd = std::sqrt(std::max(0.0, v(j, j)));
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
  return {center - z * sd, center + z * sd, level, IntervalMethod::SandwichNormal};
}

/// Per coordinate: fraction of replicates whose interval covers the truth, and mean length.
/// intervals[r][j] is replicate r, coordinate j.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> coverage_and_length(
    const std::vector<std::vector<IntervalEstimate>>& intervals, const Eigen::VectorXd& beta_true) {
  const Eigen::Index p = beta_true.size();
  Eigen::VectorXd cover = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd len = Eigen::VectorXd::Zero(p);
  if (intervals.empty()) return {cover, len};
  for (const auto& rep : intervals) {
    if (static_cast<Eigen::Index>(rep.size()) != p) throw std::invalid_argument("coverage: dimension mismatch");
    for (Eigen::Index j = 0; j < p; ++j) {
      cover(j) += rep[static_cast<std::size_t>(j)].covers(beta_true(j)) ? 1.0 : 0.0;
      len(j) += rep[static_cast<std::size_t>(j)].length();
    }
  }
  const double r = static_cast<double>(intervals.size());
  return {cover / r, len / r};
}

/// Matthews correlation; 0 when any margin of the confusion table is empty.
inline double mcc(const Eigen::VectorXi& gamma_hat, const Eigen::VectorXi& gamma_true) {
  if (gamma_hat.size() != gamma_true.size()) throw std::invalid_argument("mcc: length mismatch");
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (Eigen::Index j = 0; j < gamma_hat.size(); ++j) {
    const bool h = gamma_hat(j) != 0;
    const bool t = gamma_true(j) != 0;
    if (h && t) ++tp;
    else if (!h && !t) ++tn;
    else if (h) ++fp;
    else ++fn;
  }
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

/// gamma_hat_j = 1[Pr(gamma_j = 1 | data) > 0.5].
inline Eigen::VectorXi median_probability_model(const PosteriorDraws& draws) {
  const Eigen::VectorXd pi = draws.inclusion_prob();
  Eigen::VectorXi g(pi.size());
  for (Eigen::Index j = 0; j < pi.size(); ++j) g(j) = pi(j) > 0.5 ? 1 : 0;
  return g;
}

/// Median over coordinates of the per-coordinate median over replicates.
/// values is replicates x coordinates.
inline double median_of_medians(const Eigen::MatrixXd& values) {
  if (values.size() == 0) throw std::invalid_argument("median_of_medians: empty input");
  std::vector<double> per_coord;
  for (Eigen::Index j = 0; j < values.cols(); ++j) per_coord.push_back(quantile(Eigen::VectorXd(values.col(j)), 0.5));
  return median(per_coord);
}

}  // namespace sphreg
