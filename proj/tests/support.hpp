#pragma once

// Helpers shared by the unit and acceptance tests. Reference densities come
// from Boost.Math rather than the library so that the checks are independent.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "hmmix/data.hpp"
#include "hmmix/model.hpp"

namespace hmmix::testing {

inline double ref_gamma_pdf(double x, double theta, double eta) {
  if (x <= 0.0) return 0.0;
  return boost::math::pdf(boost::math::gamma_distribution<double>(eta, theta / eta), x);
}

inline double ref_normal_pdf(double x, double mu, double sigma2) {
  return boost::math::pdf(boost::math::normal_distribution<double>(mu, std::sqrt(sigma2)), x);
}

inline double ref_phi(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(0.0, 1.0), x); }

inline double ref_density(const MixtureParams& mix, std::size_t k, double x) {
  return k < mix.K() ? ref_gamma_pdf(x, mix.theta[k], mix.eta[k]) : ref_normal_pdf(x, mix.mu, mix.sigma2);
}

// One chromosome with the given positions and expressions; d uses the
// series' own largest gap.
inline ChromosomeSeries make_series(const std::string& label, std::vector<std::int64_t> positions,
                                    std::vector<double> x) {
  ChromosomeSeries s;
  s.chromosome = label;
  s.positions = std::move(positions);
  s.x = std::move(x);
  std::vector<std::vector<std::int64_t>> all{s.positions};
  const auto g = s.positions.size() > 1 ? max_gap(all) : 2;
  s.d = rescale_distances(s.positions, std::max<std::int64_t>(g, 2));
  for (std::size_t i = 0; i < s.x.size(); ++i) s.probe_ids.push_back(label + "_" + std::to_string(i));
  return s;
}

inline Dataset single(ChromosomeSeries s) {
  Dataset d;
  d.series.push_back(std::move(s));
  return d;
}

inline MixtureParams mixture(std::vector<double> theta, std::vector<double> eta, double mu, double sigma2) {
  MixtureParams m;
  m.theta = std::move(theta);
  m.eta = std::move(eta);
  m.mu = mu;
  m.sigma2 = sigma2;
  return m;
}

inline MarkovParams markov(std::vector<double> q0, std::vector<double> Q_rows, Vec2 beta) {
  MarkovParams m;
  const std::size_t K1 = q0.size();
  m.q0 = std::move(q0);
  m.Q = Matrix(K1, K1);
  m.Q.values() = std::move(Q_rows);
  m.beta = beta;
  return m;
}

// Weakly informative priors for K gamma components: prior means of theta at
// 3, 6, ..., mu near 12, flat Dirichlets, exponential(mean 50) for eta.
inline Priors weak_priors(std::size_t K) {
  Priors p;
  const std::size_t K1 = K + 1;
  p.r0.assign(K1, 1.0);
  p.r = Matrix(K1, K1, 1.0);
  for (std::size_t k = 0; k < K; ++k) {
    p.t1.push_back(2.0);
    p.t2.push_back(3.0 * static_cast<double>(k + 1));
  }
  p.e1.assign(K, 50.0);
  p.e2.assign(K, 1.0);
  p.m = 12.0;
  p.v = 100.0;
  p.s1 = 2.0;
  p.s2 = 1.0;
  p.mu0 = {0.0, 0.0};
  p.Sigma0 = {10.0, 0.0, 0.0, 10.0};
  return p;
}

// Random but valid parameters for K gamma components, well inside the
// numerical comfort zone.
inline void random_parameters(std::size_t K, std::mt19937_64& gen, MixtureParams& mix, MarkovParams& mk) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mix = MixtureParams{};
  double t = 1.0 + 2.0 * u(gen);
  for (std::size_t k = 0; k < K; ++k) {
    mix.theta.push_back(t);
    mix.eta.push_back(2.0 + 20.0 * u(gen));
    t += 1.0 + 2.0 * u(gen);
  }
  mix.mu = t + 1.0 + 2.0 * u(gen);
  mix.sigma2 = 0.3 + u(gen);
  const std::size_t K1 = K + 1;
  auto simplex = [&] {
    std::vector<double> p(K1);
    double s = 0.0;
    for (auto& v : p) s += (v = 0.2 + u(gen));
    for (auto& v : p) v /= s;
    return p;
  };
  mk.q0 = simplex();
  mk.Q = Matrix(K1, K1);
  for (std::size_t j = 0; j < K1; ++j) {
    const auto row = simplex();
    for (std::size_t k = 0; k < K1; ++k) mk.Q(j, k) = row[k];
  }
  mk.beta = {-1.0 + 3.0 * u(gen), -4.0 * u(gen)};
}

// Expressions spread over the support of all components.
inline std::vector<double> random_expressions(const MixtureParams& mix, std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.5 * mix.theta.front(), mix.mu + std::sqrt(mix.sigma2));
  std::vector<double> x(n);
  for (auto& v : x) v = u(gen);
  return x;
}

inline std::vector<std::int64_t> random_positions_for_test(std::size_t n, std::mt19937_64& gen) {
  std::uniform_int_distribution<std::int64_t> gap(1, 5000);
  std::vector<std::int64_t> p(n);
  std::int64_t cur = 100;
  for (auto& v : p) v = (cur += gap(gen));
  return p;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("hmmix_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& leaf = "") const { return leaf.empty() ? path_.string() : (path_ / leaf).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string fixture(const std::string& name) { return std::string(HMMIX_FIXTURE_DIR) + "/" + name; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace hmmix::testing
