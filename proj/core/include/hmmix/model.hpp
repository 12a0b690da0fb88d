#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hmmix/data.hpp"

namespace hmmix {

// Dense row-major matrix for the small (K+1)x(K+1) objects in the model.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& values() const { return data_; }
  std::vector<double>& values() { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<double, 4>;  // row-major {a, b, c, d}

// K gamma components (mean theta_k, shape eta_k) followed by one Gaussian
// component (mu, sigma2). Component index K is the Gaussian.
struct MixtureParams {
  std::vector<double> theta;
  std::vector<double> eta;
  double mu = 0.0;
  double sigma2 = 1.0;

  std::size_t K() const { return theta.size(); }
  std::size_t components() const { return theta.size() + 1; }
  double log_density(std::size_t k, double x) const;

  // theta_1 < ... < theta_K < mu and positivity.
  bool ordered() const;
  void validate() const;

  friend bool operator==(const MixtureParams&, const MixtureParams&) = default;
};

struct MarkovParams {
  std::vector<double> q0;  // allocation law when there is no Markov dependence
  Matrix Q;                // transition matrix, row j = law given previous state j
  Vec2 beta{0.0, 0.0};     // probit coefficients for P(W_i = 1) = Phi(b0 + b1 d_i)

  void validate(std::size_t components) const;

  friend bool operator==(const MarkovParams&, const MarkovParams&) = default;
};

struct Priors {
  std::vector<double> r0;  // Dirichlet for q0
  Matrix r;                // row j = Dirichlet for Q row j
  std::vector<double> t1, t2;  // inverse gamma shape / scale for theta_k
  std::vector<double> e1, e2;  // gamma mean / shape for eta_k
  double m = 0.0, v = 1.0, s1 = 1.0, s2 = 1.0;  // normal-inverse-gamma for (mu, sigma2)
  Vec2 mu0{0.0, 0.0};
  Mat2 Sigma0{1.0, 0.0, 0.0, 1.0};

  std::size_t K() const { return t1.size(); }
  void validate() const;

  friend bool operator==(const Priors&, const Priors&) = default;
};

// Allocation z_i is stored as the component index, which makes the one-hot
// constraint structural. v_i is NaN where it is undefined (first location of
// each chromosome).
struct LatentState {
  std::vector<std::uint8_t> z;
  std::vector<std::uint8_t> w;
  std::vector<double> v;

  std::size_t size() const { return z.size(); }
  void resize(std::size_t n);
};

// --- Density kernels -------------------------------------------------------

// Gamma with mean theta and shape eta (rate eta/theta). Zero for x <= 0.
double gamma_pdf(double x, double theta, double eta);
double gamma_log_pdf(double x, double theta, double eta);
double normal_pdf(double x, double mu, double sigma2);
double normal_log_pdf(double x, double mu, double sigma2);

// Standard normal c.d.f. and friends. Accurate far into both tails.
double norm_cdf(double x);
double log_norm_cdf(double x);
double norm_quantile(double p);

// Probability of Markov dependence at rescaled distance d.
double rho(const Vec2& beta, double d);

// --- Prior log densities (normalized) ---------------------------------------

double log_dirichlet(std::span<const double> p, std::span<const double> alpha);
double log_inverse_gamma(double x, double shape, double scale);
double log_gamma_mean_shape(double x, double mean, double shape);
double log_bivariate_normal(const Vec2& x, const Vec2& mean, const Mat2& cov);

// Log of the joint density of X, Z, W, V and all parameters. The ordering
// constraint enters as an indicator; its normalizing constant is omitted.
// Throws ContractError when an input invariant is violated.
double log_joint(const Dataset& data, const LatentState& latent, const MixtureParams& mix,
                 const MarkovParams& markov, const Priors& priors);

// Checks the latent invariants against the dataset layout.
void validate(const LatentState& latent, const Dataset& data, std::size_t components);

// Defaults used for the four-gamma model. Any other K needs explicit priors
// and throws ConfigError.
Priors default_priors(std::size_t K);

}  // namespace hmmix
