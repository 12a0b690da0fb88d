#include "hmmix/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hmmix/error.hpp"

namespace hmmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(what) + " must be positive and finite");
  }
}

bool is_probability_vector(std::span<const double> p) {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    total += x;
  }
  return std::abs(total - 1.0) < 1e-9;
}

}  // namespace

// --- Parameter types --------------------------------------------------------

double MixtureParams::log_density(std::size_t k, double x) const {
  if (k < theta.size()) return gamma_log_pdf(x, theta[k], eta[k]);
  return normal_log_pdf(x, mu, sigma2);
}

bool MixtureParams::ordered() const {
  for (std::size_t k = 1; k < theta.size(); ++k) {
    if (!(theta[k - 1] < theta[k])) return false;
  }
  return theta.empty() || theta.back() < mu;
}

void MixtureParams::validate() const {
  if (theta.empty()) throw ContractError("mixture needs at least one gamma component");
  if (eta.size() != theta.size()) throw ContractError("theta and eta lengths differ");
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (!(theta[k] > 0.0) || !(eta[k] > 0.0)) {
      throw ContractError("gamma component " + std::to_string(k + 1) + " has non-positive mean or shape");
    }
  }
  if (!(sigma2 > 0.0)) throw ContractError("Gaussian variance must be positive");
  if (!std::isfinite(mu)) throw ContractError("Gaussian mean must be finite");
  if (!ordered()) throw ContractError("component means violate theta_1 < ... < theta_K < mu");
}

void MarkovParams::validate(std::size_t components) const {
  if (q0.size() != components) throw ContractError("q0 has the wrong length");
  if (!is_probability_vector(q0)) throw ContractError("q0 is not a probability vector");
  if (Q.rows() != components || Q.cols() != components) throw ContractError("Q has the wrong shape");
  for (std::size_t j = 0; j < components; ++j) {
    if (!is_probability_vector(Q.row(j))) {
      throw ContractError("row " + std::to_string(j + 1) + " of Q is not a probability vector");
    }
  }
  if (!std::isfinite(beta[0]) || !std::isfinite(beta[1])) throw ContractError("beta must be finite");
}

void Priors::validate() const {
  const std::size_t K = t1.size();
  if (K == 0) throw ConfigError("priors need at least one gamma component");
  if (t2.size() != K || e1.size() != K || e2.size() != K) {
    throw ConfigError("gamma-component prior vectors must all have length K");
  }
  if (r0.size() != K + 1) throw ConfigError("r0 must have length K+1");
  if (r.rows() != K + 1 || r.cols() != K + 1) throw ConfigError("r must be (K+1)x(K+1)");
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  for (double x : r0) if (!positive(x)) throw ConfigError("r0 entries must be positive");
  for (double x : r.values()) if (!positive(x)) throw ConfigError("r entries must be positive");
  for (std::size_t k = 0; k < K; ++k) {
    if (!positive(t1[k]) || !positive(t2[k]) || !positive(e1[k]) || !positive(e2[k])) {
      throw ConfigError("theta/eta prior hyperparameters must be positive");
    }
  }
  if (!positive(v) || !positive(s1) || !positive(s2) || !std::isfinite(m)) {
    throw ConfigError("normal-inverse-gamma hyperparameters invalid");
  }
  const double det = Sigma0[0] * Sigma0[3] - Sigma0[1] * Sigma0[2];
  if (std::abs(Sigma0[1] - Sigma0[2]) > 1e-12 * (std::abs(Sigma0[0]) + std::abs(Sigma0[3])) ||
      !(Sigma0[0] > 0.0) || !(det > 0.0)) {
    throw ConfigError("Sigma0 must be symmetric positive-definite");
  }
}

void LatentState::resize(std::size_t n) {
  z.assign(n, 0);
  w.assign(n, 0);
  v.assign(n, std::nan(""));
}

// --- Kernels ------------------------------------------------------------------

double gamma_log_pdf(double x, double theta, double eta) {
  require_positive(theta, "gamma mean");
  require_positive(eta, "gamma shape");
  if (!(x > 0.0)) return kNegInf;
  const double rate = eta / theta;
  return eta * std::log(rate) - std::lgamma(eta) + (eta - 1.0) * std::log(x) - rate * x;
}

double gamma_pdf(double x, double theta, double eta) {
  require_positive(theta, "gamma mean");
  require_positive(eta, "gamma shape");
  if (!(x > 0.0)) return 0.0;
  return std::exp(gamma_log_pdf(x, theta, eta));
}

double normal_log_pdf(double x, double mu, double sigma2) {
  require_positive(sigma2, "normal variance");
  const double z = x - mu;
  return -kLogSqrt2Pi - 0.5 * std::log(sigma2) - 0.5 * z * z / sigma2;
}

double normal_pdf(double x, double mu, double sigma2) { return std::exp(normal_log_pdf(x, mu, sigma2)); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_norm_cdf(double x) {
  if (x > -30.0) return std::log(norm_cdf(x));
  // Asymptotic series of the Mills ratio for the far lower tail.
  const double x2 = x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -(2.0 * k - 1.0) / x2;
    sum += term;
  }
  return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log(sum);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw DomainError("quantile probability outside [0,1]");
  }
  // Acklam's rational approximation, then two Halley steps on erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int it = 0; it < 2; ++it) {
    const double e = norm_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double rho(const Vec2& beta, double d) { return norm_cdf(beta[0] + beta[1] * d); }

// --- Prior densities --------------------------------------------------------

double log_dirichlet(std::span<const double> p, std::span<const double> alpha) {
  double total = 0.0, out = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    total += alpha[k];
    out -= std::lgamma(alpha[k]);
    if (alpha[k] != 1.0) out += (alpha[k] - 1.0) * std::log(p[k]);
  }
  return out + std::lgamma(total);
}

double log_inverse_gamma(double x, double shape, double scale) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double log_gamma_mean_shape(double x, double mean, double shape) {
  if (!(x > 0.0)) return kNegInf;
  const double rate = shape / mean;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_bivariate_normal(const Vec2& x, const Vec2& mean, const Mat2& cov) {
  const double det = cov[0] * cov[3] - cov[1] * cov[2];
  const double d0 = x[0] - mean[0], d1 = x[1] - mean[1];
  // quadratic form with the inverse [d -b; -c a] / det
  const double q = (cov[3] * d0 * d0 - (cov[1] + cov[2]) * d0 * d1 + cov[0] * d1 * d1) / det;
  return -2.0 * kLogSqrt2Pi - 0.5 * std::log(det) - 0.5 * q;
}

// --- Joint ------------------------------------------------------------------

void validate(const LatentState& latent, const Dataset& data, std::size_t components) {
  const std::size_t n = data.total_n();
  if (latent.z.size() != n || latent.w.size() != n || latent.v.size() != n) {
    throw ContractError("latent state length does not match the dataset");
  }
  const auto offsets = data.offsets();
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (offsets[c + 1] <= i) ++c;
    if (latent.z[i] >= components) throw ContractError("allocation index out of range");
    if (latent.w[i] > 1) throw ContractError("dependence indicator must be 0 or 1");
    const bool first = (i == offsets[c]);
    if (first) {
      if (latent.w[i] != 0) throw ContractError("W must be 0 at the first location of a chromosome");
      continue;
    }
    if (!std::isnan(latent.v[i]) && ((latent.v[i] > 0.0) != (latent.w[i] == 1))) {
      throw ContractError("sign of V disagrees with W at location " + std::to_string(i));
    }
  }
}

double log_joint(const Dataset& data, const LatentState& latent, const MixtureParams& mix,
                 const MarkovParams& markov, const Priors& priors) {
  mix.validate();
  const std::size_t K1 = mix.components();
  markov.validate(K1);
  priors.validate();
  if (priors.K() != mix.K()) throw ContractError("prior and mixture disagree on K");
  validate(latent, data, K1);

  double out = 0.0;
  std::size_t g = 0;
  for (const auto& s : data.series) {
    for (std::size_t i = 0; i < s.size(); ++i, ++g) {
      const std::size_t k = latent.z[g];
      out += mix.log_density(k, s.x[i]);
      if (i == 0) {
        out += std::log(markov.q0[k]);
        continue;
      }
      if (latent.w[g]) {
        out += std::log(markov.Q(latent.z[g - 1], k));
      } else {
        out += std::log(markov.q0[k]);
      }
      const double v = latent.v[g];
      if (std::isnan(v)) throw ContractError("V undefined at a free location " + std::to_string(g));
      const double mean = markov.beta[0] + markov.beta[1] * s.d[i];
      out += -kLogSqrt2Pi - 0.5 * (v - mean) * (v - mean);
    }
  }

  out += log_dirichlet(markov.q0, priors.r0);
  for (std::size_t j = 0; j < K1; ++j) out += log_dirichlet(markov.Q.row(j), priors.r.row(j));
  for (std::size_t k = 0; k < mix.K(); ++k) {
    out += log_inverse_gamma(mix.theta[k], priors.t1[k], priors.t2[k]);
    out += log_gamma_mean_shape(mix.eta[k], priors.e1[k], priors.e2[k]);
  }
  out += normal_log_pdf(mix.mu, priors.m, priors.v * mix.sigma2);
  out += log_inverse_gamma(mix.sigma2, priors.s1, priors.s2);
  out += log_bivariate_normal(markov.beta, priors.mu0, priors.Sigma0);
  return out;
}

Priors default_priors(std::size_t K) {
  if (K != 4) {
    throw ConfigError("built-in priors exist only for K = 4; supply a prior configuration for K = " +
                      std::to_string(K));
  }
  Priors p;
  p.r0 = {750.0, 750.0, 750.0, 750.0, 10.0};
  p.r = Matrix(5, 5);
  const double rows[5][5] = {
      {969.70, 484.85, 96.97, 48.48, 10.0},  {484.85, 969.70, 484.85, 96.97, 10.0},
      {96.97, 484.85, 969.70, 484.85, 10.0}, {48.48, 96.97, 484.85, 969.70, 10.0},
      {48.48, 48.48, 96.97, 484.85, 969.7},
  };
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) p.r(i, j) = rows[i][j];
  p.t1 = {4.0, 4.0, 4.0, 4.0};
  p.t2 = {9.0, 18.0, 27.0, 36.0};
  p.e1 = {50.0, 50.0, 50.0, 50.0};
  p.e2 = {1.0, 1.0, 1.0, 1.0};
  p.m = 15.0;
  p.v = 25.0;
  p.s1 = 2.1;
  p.s2 = 1.1;
  p.mu0 = {4.0, -8.0};
  p.Sigma0 = {10.0, 0.0, 0.0, 10.0};
  return p;
}

}  // namespace hmmix
