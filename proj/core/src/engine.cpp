#include "treespde/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "treespde/quadrature.hpp"
#include "treespde/rng.hpp"

namespace treespde {

DriftPreset DriftPreset::zero() { return {}; }

DriftPreset DriftPreset::masked_sine() {
  DriftPreset d;
  d.tag = Tag::masked_sine;
  return d;
}

DriftPreset DriftPreset::scaled_dissipative(double c) {
  if (c == 0.0 || !std::isfinite(c))
    throw std::invalid_argument("dissipative scale must be nonzero");
  DriftPreset d;
  d.tag = Tag::scaled_dissipative;
  d.scale = c;
  return d;
}

DriftPreset DriftPreset::cubic() {
  DriftPreset d;
  d.tag = Tag::cubic;
  return d;
}

DriftPreset DriftPreset::parse(const std::string& text) {
  if (text == "zero") return zero();
  if (text == "masked_sine") return masked_sine();
  if (text == "cubic") return cubic();
  const std::string prefix = "scaled_dissipative";
  if (text.rfind(prefix, 0) == 0) {
    std::string rest = text.substr(prefix.size());
    if (rest.empty()) return scaled_dissipative(1.0);
    if (rest.front() == ':' || rest.front() == '=') {
      rest.erase(rest.begin());
      std::size_t used = 0;
      double c = 0.0;
      try {
        c = std::stod(rest, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad dissipative scale: " + rest);
      }
      if (used != rest.size()) throw std::invalid_argument("bad dissipative scale: " + rest);
      return scaled_dissipative(c);
    }
  }
  throw std::invalid_argument("unknown drift preset: " + text);
}

double DriftPreset::operator()(double u) const {
  switch (tag) {
    case Tag::zero:
      return 0.0;
    case Tag::masked_sine:
      return std::sin(u);
    case Tag::scaled_dissipative:
      return u / (scale * std::sqrt(1.0 + u * u));
    case Tag::cubic:
      return u - u * u * u;
  }
  return 0.0;
}

double DriftPreset::lipschitz() const {
  switch (tag) {
    case Tag::zero:
      return 0.0;
    case Tag::masked_sine:
      return 1.0;
    case Tag::scaled_dissipative:
      // derivative (1 + u^2)^{-3/2} / scale peaks at u = 0
      return 1.0 / std::abs(scale);
    case Tag::cubic:
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

std::string DriftPreset::name() const {
  switch (tag) {
    case Tag::zero:
      return "zero";
    case Tag::masked_sine:
      return "masked_sine";
    case Tag::scaled_dissipative: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "scaled_dissipative:%g", scale);
      return buf;
    }
    case Tag::cubic:
      return "cubic";
  }
  return "zero";
}

NoiseSampler::NoiseSampler(const SpectralBasis& basis, const NoiseConfig& config)
    : n_(basis.size()) {
  lambda_.resize(n_);
  for (int k = 0; k < n_; ++k) lambda_[k] = basis.eigenvalue(k);
  c_.assign(n_, std::vector<double>(n_, 0.0));
  if (config.all_noisy()) {
    // Orthonormality makes this the exact identity, not merely close to it.
    for (int k = 0; k < n_; ++k) c_[k][k] = 1.0;
    return;
  }
  for (int k = 0; k < n_; ++k) {
    for (int l = k; l < n_; ++l) {
      double acc = 0.0;
      for (int j : config.noisy_edges)
        acc += edge_inner_product(basis.modes[k], basis.modes[l], j);
      c_[k][l] = c_[l][k] = acc;
    }
  }
}

namespace {

// (1 - e^{-s tau}) / s with the tau limit at s = 0; eigenvalue sums are >= 0.
double decay_integral(double s, double tau) {
  return s > 0.0 ? -std::expm1(-s * tau) / s : tau;
}

}  // namespace

std::vector<std::vector<double>> NoiseSampler::sigma(double tau) const {
  if (!(tau > 0.0)) throw std::invalid_argument("covariance horizon must be positive");
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_, 0.0));
  for (int k = 0; k < n_; ++k)
    for (int l = 0; l < n_; ++l)
      out[k][l] = c_[k][l] * decay_integral(lambda_[k] + lambda_[l], tau);
  return out;
}

NoiseSampler::Factor NoiseSampler::factor(double tau) const { return psd_factor(sigma(tau)); }

NoiseSampler::Factor psd_factor(const std::vector<std::vector<double>>& s, double rel_tol) {
  const int n = static_cast<int>(s.size());
  for (const auto& row : s)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("factorization needs a square matrix");

  std::vector<double> diag(n);
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) {
    diag[i] = s[i][i];
    max_diag = std::max(max_diag, diag[i]);
  }
  const double tol = rel_tol * std::max(max_diag, 1e-300);

  NoiseSampler::Factor f;
  f.l.assign(n, {});
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<std::vector<double>> l(n);  // l[original_row] grows one column per pivot

  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int i = col + 1; i < n; ++i)
      if (diag[perm[i]] > diag[perm[best]]) best = i;
    std::swap(perm[col], perm[best]);
    const int p = perm[col];
    const double piv = diag[p];
    if (piv < -100.0 * tol)
      throw std::runtime_error("matrix is not positive semidefinite");
    if (piv <= tol) break;
    const double root = std::sqrt(piv);
    l[p].push_back(root);
    for (int i = col + 1; i < n; ++i) {
      const int r = perm[i];
      double acc = s[r][p];
      for (int k = 0; k < col; ++k) acc -= l[r][k] * l[p][k];
      const double val = acc / root;
      l[r].push_back(val);
      diag[r] -= val * val;
    }
    f.rank = col + 1;
  }
  for (int i = 0; i < n; ++i) {
    l[i].resize(f.rank, 0.0);
    f.l[i] = std::move(l[i]);
  }
  return f;
}

NemytskiiProjector::NemytskiiProjector(const SpectralBasis& basis, const NoiseConfig& config,
                                       int quad)
    : n_(basis.size()), m_(basis.tree.edge_count()), q_(quad) {
  if (quad < 2) throw std::invalid_argument("quadrature order must be at least 2");
  noisy_ = config.noisy_mask;
  if (static_cast<int>(noisy_.size()) != m_)
    throw std::invalid_argument("noise mask does not match the tree");
  const GaussLegendre g(quad);
  const int cols = m_ * q_;
  eval_.resize(static_cast<std::size_t>(n_) * cols);
  weights_.resize(cols);
  for (int j = 0; j < m_; ++j)
    for (int q = 0; q < q_; ++q) weights_[j * q_ + q] = g.weights()[q];
  for (int k = 0; k < n_; ++k)
    for (int j = 0; j < m_; ++j)
      for (int q = 0; q < q_; ++q)
        eval_[static_cast<std::size_t>(k) * cols + j * q_ + q] =
            basis.modes[k].evaluate(j, g.nodes()[q]);
}

void NemytskiiProjector::project(const std::vector<double>& coeff, const DriftPreset& drift,
                                 std::vector<double>& out, std::vector<double>& values) const {
  const int cols = m_ * q_;
  values.assign(cols, 0.0);
  for (int k = 0; k < n_; ++k) {
    const double ck = coeff[k];
    if (ck == 0.0) continue;
    const double* row = &eval_[static_cast<std::size_t>(k) * cols];
    for (int c = 0; c < cols; ++c) values[c] += ck * row[c];
  }
  const bool masked = drift.masked();
  for (int c = 0; c < cols; ++c) {
    const int j = c / q_;
    const double b = (masked && !noisy_[j]) ? 0.0 : drift(values[c]);
    values[c] = weights_[c] * b;
  }
  out.assign(n_, 0.0);
  for (int k = 0; k < n_; ++k) {
    const double* row = &eval_[static_cast<std::size_t>(k) * cols];
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += row[c] * values[c];
    out[k] = acc;
  }
}

TrajectoryRunner::TrajectoryRunner(const SpectralBasis& basis, const NoiseConfig& config,
                                   const DriftPreset& drift, const IntegratorOptions& options)
    : basis_(&basis), drift_(drift), options_(options), sampler_(basis, config) {
  if (!(options.tau > 0.0)) throw std::invalid_argument("step size must be positive");
  if (options.t_final < 0.0) throw std::invalid_argument("horizon must be nonnegative");
  steps_ = static_cast<int>(std::llround(options.t_final / options.tau));
  if (std::abs(steps_ * options.tau - options.t_final) >
      1e-9 * std::max(1.0, options.t_final))
    throw std::invalid_argument("horizon must be an integer multiple of the step size");
  if (steps_ > 0) factor_ = sampler_.factor(options.tau);
  const int n = sampler_.dimension();
  decay_.resize(n);
  drift_weight_.resize(n);
  for (int k = 0; k < n; ++k) {
    const double lam = sampler_.eigenvalues()[k];
    decay_[k] = std::exp(-lam * options.tau);
    drift_weight_[k] = options.exponential_phi1 ? decay_integral(lam, options.tau)
                                                : options.tau * decay_[k];
  }
  if (!drift_.is_zero())
    projector_ = std::make_unique<NemytskiiProjector>(basis, config, options.quad);
}

Trajectory TrajectoryRunner::run(const std::vector<double>& initial,
                                 std::uint64_t stream_seed) const {
  const int n = sampler_.dimension();
  if (static_cast<int>(initial.size()) > n)
    throw std::invalid_argument("initial state longer than the basis");
  Trajectory out;
  std::vector<double> c(n, 0.0);
  std::copy(initial.begin(), initial.end(), c.begin());

  NormalSampler normal(stream_seed);
  std::vector<double> xi(factor_.rank), g, values;
  const int stride = options_.record_stride;
  if (stride > 0) {
    out.times.push_back(0.0);
    out.path.push_back(c);
  }
  const double guard2 = options_.divergence_guard * options_.divergence_guard;

  int step = 0;
  for (step = 1; step <= steps_; ++step) {
    if (projector_) {
      projector_->project(c, drift_, g, values);
      for (int k = 0; k < n; ++k) c[k] = decay_[k] * c[k] + drift_weight_[k] * g[k];
    } else {
      for (int k = 0; k < n; ++k) c[k] *= decay_[k];
    }
    for (int r = 0; r < factor_.rank; ++r) xi[r] = normal.next();
    for (int k = 0; k < n; ++k) {
      double acc = c[k];
      const std::vector<double>& row = factor_.l[k];
      for (int r = 0; r < factor_.rank; ++r) acc += row[r] * xi[r];
      c[k] = acc;
    }
    double norm2 = 0.0;
    for (int k = 0; k < n; ++k) norm2 += c[k] * c[k];
    if (!(norm2 <= guard2)) {
      out.diverged = true;
      break;
    }
    if (stride > 0 && (step % stride == 0 || step == steps_)) {
      out.times.push_back(step * options_.tau);
      out.path.push_back(c);
    }
  }
  out.steps = std::min(step, steps_);
  out.time = out.steps * options_.tau;
  out.terminal = std::move(c);
  return out;
}

GaussianLaw linear_exact_law(const SpectralBasis& basis, const NoiseConfig& config,
                             const std::vector<double>& initial, double t) {
  const NoiseSampler sampler(basis, config);
  const int n = sampler.dimension();
  if (static_cast<int>(initial.size()) > n)
    throw std::invalid_argument("initial state longer than the basis");
  GaussianLaw law;
  law.mean.assign(n, 0.0);
  for (int k = 0; k < static_cast<int>(initial.size()); ++k)
    law.mean[k] = std::exp(-sampler.eigenvalues()[k] * t) * initial[k];
  law.covariance = sampler.sigma(t);
  return law;
}

double stationary_nonconstant_second_moment(const NoiseSampler& sampler) {
  double total = 0.0;
  for (int k = 0; k < sampler.dimension(); ++k) {
    const double lam = sampler.eigenvalues()[k];
    if (lam > 1e-12) total += sampler.covariance()[k][k] / (2.0 * lam);
  }
  return total;
}

}  // namespace treespde
