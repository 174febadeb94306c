#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "treespde/graph.hpp"
#include "treespde/spectrum.hpp"

namespace treespde {

// Pointwise drift presets. Masked drifts act on noisy edges only; the
// projector applies the mask so the preset stays a scalar function.
struct DriftPreset {
  enum class Tag { zero, masked_sine, scaled_dissipative, cubic };
  Tag tag = Tag::zero;
  // c in u / (c sqrt(1 + u^2)); c < 0 flips the drift toward zero, turning the
  // bounded Lipschitz preset into a genuinely sign-dissipative one.
  double scale = 1.0;

  static DriftPreset zero();
  static DriftPreset masked_sine();
  static DriftPreset scaled_dissipative(double c);
  static DriftPreset cubic();
  static DriftPreset parse(const std::string& text);

  bool is_zero() const { return tag == Tag::zero; }
  bool masked() const { return tag == Tag::masked_sine; }
  double operator()(double u) const;
  // Global Lipschitz constant; infinity for the cubic.
  double lipschitz() const;
  std::string name() const;
};

// Covariance of the mode coefficients driven by noise on the noisy edges:
// C_kl = sum over noisy edges of the edgewise mode products. The identity
// when every edge is noisy, by orthonormality.
class NoiseSampler {
 public:
  NoiseSampler(const SpectralBasis& basis, const NoiseConfig& config);

  int dimension() const { return n_; }
  const std::vector<double>& eigenvalues() const { return lambda_; }
  const std::vector<std::vector<double>>& covariance() const { return c_; }

  // One-step covariance: Sigma(tau)_kl = C_kl (1 - e^{-(l_k+l_l) tau})/(l_k+l_l),
  // with the tau limit on the zero sum.
  std::vector<std::vector<double>> sigma(double tau) const;

  struct Factor {
    // L has one row per mode and `rank` columns; L L^T reproduces the input.
    std::vector<std::vector<double>> l;
    int rank = 0;
  };
  Factor factor(double tau) const;

 private:
  int n_ = 0;
  std::vector<double> lambda_;
  std::vector<std::vector<double>> c_;
};

// Pivoted Cholesky of a positive semidefinite matrix; pivots below
// rel_tol * max diagonal stop the factorization, significantly negative
// pivots throw.
NoiseSampler::Factor psd_factor(const std::vector<std::vector<double>>& s,
                                double rel_tol = 1e-12);

// Evaluates the truncated field on Gauss-Legendre nodes, applies the drift,
// and projects back onto the modes; quadrature is exact for the products
// appearing in the moment tests up to the stated node count.
class NemytskiiProjector {
 public:
  NemytskiiProjector(const SpectralBasis& basis, const NoiseConfig& config, int quad);

  int quad_points() const { return q_; }
  void project(const std::vector<double>& coeff, const DriftPreset& drift,
               std::vector<double>& out, std::vector<double>& values) const;

 private:
  int n_ = 0, m_ = 0, q_ = 0;
  std::vector<char> noisy_;
  std::vector<double> eval_;     // n_ rows by (m_ q_) columns
  std::vector<double> weights_;  // per column
};

struct IntegratorOptions {
  double tau = 0.03125;
  double t_final = 0.5;
  bool exponential_phi1 = true;  // false: plain exponential Euler
  int quad = 128;
  double divergence_guard = 1e6;
  int record_stride = 0;  // 0: terminal only; s > 0: every s steps plus endpoints
};

struct Trajectory {
  std::vector<double> terminal;
  double time = 0.0;
  int steps = 0;
  bool diverged = false;
  std::vector<double> times;
  std::vector<std::vector<double>> path;
};

class TrajectoryRunner {
 public:
  TrajectoryRunner(const SpectralBasis& basis, const NoiseConfig& config,
                   const DriftPreset& drift, const IntegratorOptions& options);

  int steps() const { return steps_; }
  const NoiseSampler& sampler() const { return sampler_; }
  const IntegratorOptions& options() const { return options_; }
  // Bit-identical for equal (initial state, stream seed).
  Trajectory run(const std::vector<double>& initial, std::uint64_t stream_seed) const;

 private:
  const SpectralBasis* basis_;
  DriftPreset drift_;
  IntegratorOptions options_;
  NoiseSampler sampler_;
  NoiseSampler::Factor factor_;
  std::vector<double> decay_;         // e^{-lambda tau}
  std::vector<double> drift_weight_;  // tau phi1(-lambda tau) or tau e^{-lambda tau}
  std::unique_ptr<NemytskiiProjector> projector_;
  int steps_ = 0;
};

// Exact terminal law of the drift-free equation from a deterministic start.
struct GaussianLaw {
  std::vector<double> mean;
  std::vector<std::vector<double>> covariance;
};
GaussianLaw linear_exact_law(const SpectralBasis& basis, const NoiseConfig& config,
                             const std::vector<double>& initial, double t);

// Trace of the stationary covariance restricted to nonconstant modes; the
// constant coefficient of a noisy constant direction has no stationary law.
double stationary_nonconstant_second_moment(const NoiseSampler& sampler);

}  // namespace treespde
