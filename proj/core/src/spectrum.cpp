#include "treespde/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "treespde/nullspace.hpp"
#include "treespde/quadrature.hpp"

namespace treespde {

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^1 cos(t x) dx, stable near t = 0.
double sinc01(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// int_0^1 sin(t x) dx = (1 - cos t)/t, odd in t, stable near t = 0.
double versine01(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return t / 2.0 - t * t2 / 24.0;
  }
  const double h = std::sin(t / 2.0);
  return 2.0 * h * h / t;
}

}  // namespace

void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        const double small =
            1e-16 * (std::abs(a[p][p]) + std::abs(a[q][q])) + 1e-300;
        if (std::abs(apq) <= small) continue;
        rotated = true;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e154) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a[p][p] -= t * apq;
        a[q][q] += t * apq;
        a[p][q] = a[q][p] = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = a[p][i] = c * aip - s * aiq;
          a[i][q] = a[q][i] = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v[i][p], viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&a](int x, int y) { return a[x][x] < a[y][y]; });
  eigenvalues.assign(n, 0.0);
  eigenvectors.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    eigenvalues[i] = a[order[i]][order[i]];
    for (int r = 0; r < n; ++r) eigenvectors[i][r] = v[r][order[i]];
  }
}

AdjacencySpectrum adjacency_spectrum(const MetricTree& tree) {
  const GraphMatrices gm = derive_matrices(tree);
  const int n = tree.vertex_count();

  // Symmetrized D^{-1/2} A D^{-1/2}; same eigenvalues as D^{-1} A, and
  // U = D^{-1/2} w turns its eigenvectors into right eigenvectors of D^{-1}A.
  std::vector<std::vector<double>> sym(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (gm.adjacency[i][k] != 0)
        sym[i][k] = 1.0 / std::sqrt(static_cast<double>(gm.degree[i]) *
                                    static_cast<double>(gm.degree[k]));

  std::vector<double> w;
  std::vector<std::vector<double>> vecs;
  jacobi_eigen(std::move(sym), w, vecs);

  AdjacencySpectrum out;
  out.eigenvalues = w;
  for (double mu : w)
    if (std::abs(mu) > 1.0 + 1e-9)
      throw std::logic_error("normalized adjacency eigenvalue outside [-1, 1]");

  std::vector<std::vector<double>> columns(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (int r = 0; r < n; ++r) {
      columns[i][r] = vecs[i][r] / std::sqrt(static_cast<double>(gm.degree[r]));
      norm2 += columns[i][r] * columns[i][r];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    int lead = 0;
    for (int r = 1; r < n; ++r)
      if (std::abs(columns[i][r]) > std::abs(columns[i][lead])) lead = r;
    const double sgn = columns[i][lead] < 0.0 ? -inv : inv;
    for (int r = 0; r < n; ++r) columns[i][r] *= sgn;
  }

  // Cluster by gaps; Jacobi smears a true multiplicity over ~1e-15.
  const double ctol = 1e-8;
  for (int i = 0; i < n;) {
    int jend = i + 1;
    while (jend < n && w[jend] - w[jend - 1] <= ctol) ++jend;
    AdjacencyEigenGroup g;
    double sum = 0.0;
    for (int k = i; k < jend; ++k) sum += w[k];
    g.mu = sum / (jend - i);
    for (int k = i; k < jend; ++k) g.vectors.push_back(columns[k]);
    out.groups.push_back(std::move(g));
    i = jend;
  }

  // The zero cluster gets the exact kernel basis: these vectors feed both
  // the simulated modes and the rational Feller decision, so they must agree.
  const KernelBasis kb = kernel_basis(tree);
  const int d = kb.dimension();
  if (d > 0) {
    int zi = 0;
    for (int g = 1; g < static_cast<int>(out.groups.size()); ++g)
      if (std::abs(out.groups[g].mu) < std::abs(out.groups[zi].mu)) zi = g;
    if (std::abs(out.groups[zi].mu) > 1e-7)
      throw std::logic_error("kernel dimension positive but no zero eigenvalue cluster");
    if (static_cast<int>(out.groups[zi].vectors.size()) != d)
      throw std::logic_error("zero cluster size disagrees with exact kernel dimension");
    out.groups[zi].mu = 0.0;
    out.groups[zi].zero_group = true;
    out.groups[zi].vectors.clear();
    for (int r = 0; r < d; ++r) {
      std::vector<double> row(n);
      for (int c = 0; c < n; ++c) row[c] = kb.basis(r, c).to_double();
      out.groups[zi].vectors.push_back(std::move(row));
    }
  } else {
    for (const auto& g : out.groups)
      if (std::abs(g.mu) <= 1e-7)
        throw std::logic_error("zero eigenvalue cluster but trivial exact kernel");
  }
  return out;
}

double EigenMode::evaluate(int j, double x) const {
  return cos_coeff[j] * std::cos(omega * x) + sin_coeff[j] * std::sin(omega * x);
}

double EigenMode::derivative(int j, double x) const {
  return omega * (sin_coeff[j] * std::cos(omega * x) - cos_coeff[j] * std::sin(omega * x));
}

std::vector<EigenMode> sigma1_modes(const MetricTree& tree, int k_max) {
  const int m = tree.edge_count();
  const std::vector<int> color = bipartition(tree);
  std::vector<EigenMode> out;
  out.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    EigenMode mode;
    mode.family = 1;
    mode.generator_k = k;
    mode.omega = k * kPi;
    mode.eigenvalue = mode.omega * mode.omega;
    mode.cos_coeff.assign(m, 0.0);
    mode.sin_coeff.assign(m, 0.0);
    const double amp =
        k == 0 ? 1.0 / std::sqrt(static_cast<double>(m)) : std::sqrt(2.0 / m);
    for (int j = 0; j < m; ++j) {
      // Odd harmonics flip sign across the bipartition so that the edgewise
      // cosines glue continuously; endpoint derivatives vanish, so the
      // Kirchhoff sum is zero regardless of the tree.
      double s = 1.0;
      if (k % 2 == 1 && color[tree.edge(j).tail] == 1) s = -1.0;
      mode.cos_coeff[j] = s * amp;
    }
    out.push_back(std::move(mode));
  }
  return out;
}

std::vector<double> admissible_frequencies(double mu, double freq_max) {
  if (mu <= -1.0 + 1e-9 || mu >= 1.0 - 1e-9)
    throw std::invalid_argument("frequencies are generated by interior eigenvalues only");
  const double base = std::acos(mu);
  std::vector<double> omegas;
  for (int l = 0;; ++l) {
    const double w1 = base + 2.0 * kPi * l;
    const double w2 = (2.0 * kPi - base) + 2.0 * kPi * l;
    if (w1 > freq_max && w2 > freq_max) break;
    if (w1 <= freq_max) omegas.push_back(w1);
    if (w2 <= freq_max) omegas.push_back(w2);
  }
  std::sort(omegas.begin(), omegas.end());
  return omegas;
}

EigenMode make_vertex_mode(const MetricTree& tree, const std::vector<double>& values,
                           double omega) {
  if (static_cast<int>(values.size()) != tree.vertex_count())
    throw std::invalid_argument("vertex value count does not match the tree");
  const double sw = std::sin(omega);
  if (std::abs(sw) < 1e-9)
    throw std::logic_error("vanishing sin(omega) for an interior eigenvalue");
  const double cw = std::cos(omega);
  const int m = tree.edge_count();
  EigenMode mode;
  mode.family = 2;
  mode.omega = omega;
  mode.eigenvalue = omega * omega;
  mode.cos_coeff.assign(m, 0.0);
  mode.sin_coeff.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    const Edge& e = tree.edge(j);
    mode.cos_coeff[j] = values[e.tail];
    mode.sin_coeff[j] = (values[e.head] - values[e.tail] * cw) / sw;
  }
  const double nrm = std::sqrt(inner_product(mode, mode));
  if (!(nrm > 1e-12)) throw std::logic_error("adjacency-generated mode with vanishing norm");
  for (int j = 0; j < m; ++j) {
    mode.cos_coeff[j] /= nrm;
    mode.sin_coeff[j] /= nrm;
  }
  return mode;
}

std::vector<EigenMode> sigma2_modes(const MetricTree& tree,
                                    const AdjacencySpectrum& spectrum,
                                    double freq_max) {
  std::vector<EigenMode> out;
  for (int gi = 0; gi < static_cast<int>(spectrum.groups.size()); ++gi) {
    const AdjacencyEigenGroup& g = spectrum.groups[gi];
    // mu = +-1 would need sin(omega) = 0; those directions are exactly the
    // graph-independent family, so only the open interval generates here.
    if (g.mu <= -1.0 + 1e-9 || g.mu >= 1.0 - 1e-9) continue;
    for (double w : admissible_frequencies(g.mu, freq_max)) {
      for (int ci = 0; ci < static_cast<int>(g.vectors.size()); ++ci) {
        EigenMode mode = make_vertex_mode(tree, g.vectors[ci], w);
        mode.generator_mu = g.mu;
        mode.group_index = gi;
        mode.column_index = ci;
        out.push_back(std::move(mode));
      }
    }
  }
  return out;
}

double edge_inner_product(const EigenMode& f, const EigenMode& g, int j) {
  const double w1 = f.omega, w2 = g.omega;
  const double a1 = f.cos_coeff[j], b1 = f.sin_coeff[j];
  const double a2 = g.cos_coeff[j], b2 = g.sin_coeff[j];
  const double cc = 0.5 * (sinc01(w1 - w2) + sinc01(w1 + w2));
  const double ss = 0.5 * (sinc01(w1 - w2) - sinc01(w1 + w2));
  const double cs = 0.5 * (versine01(w2 + w1) + versine01(w2 - w1));  // cos(w1 x) sin(w2 x)
  const double sc = 0.5 * (versine01(w1 + w2) + versine01(w1 - w2));
  return a1 * a2 * cc + b1 * b2 * ss + a1 * b2 * cs + b1 * a2 * sc;
}

double inner_product(const EigenMode& f, const EigenMode& g) {
  double total = 0.0;
  const int m = static_cast<int>(f.cos_coeff.size());
  for (int j = 0; j < m; ++j) total += edge_inner_product(f, g, j);
  return total;
}

double inner_product_quadrature(const EigenMode& f, const EigenMode& g, int nodes) {
  const GaussLegendre quad(nodes);
  double total = 0.0;
  const int m = static_cast<int>(f.cos_coeff.size());
  for (int j = 0; j < m; ++j)
    for (int q = 0; q < nodes; ++q) {
      const double x = quad.nodes()[q];
      total += quad.weights()[q] * f.evaluate(j, x) * g.evaluate(j, x);
    }
  return total;
}

ModeResiduals mode_residuals(const MetricTree& tree, const EigenMode& mode) {
  ModeResiduals r{0.0, 0.0, 0.0, 0.0};
  for (int v = 0; v < tree.vertex_count(); ++v) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double flux = 0.0;
    for (int j : tree.incident_edges(v)) {
      const Edge& e = tree.edge(j);
      if (e.tail == v) {
        const double val = mode.evaluate(j, 0.0);
        lo = std::min(lo, val);
        hi = std::max(hi, val);
        flux += mode.derivative(j, 0.0);
      } else {
        const double val = mode.evaluate(j, 1.0);
        lo = std::min(lo, val);
        hi = std::max(hi, val);
        flux -= mode.derivative(j, 1.0);
      }
    }
    r.continuity = std::max(r.continuity, hi - lo);
    r.kirchhoff = std::max(r.kirchhoff, std::abs(flux));
  }
  const double lam = mode.eigenvalue;
  for (int j = 0; j < tree.edge_count(); ++j) {
    for (int t = 0; t < 10; ++t) {
      const double x = (t + 0.5) / 10.0;
      const double second =
          -mode.omega * mode.omega *
          (mode.cos_coeff[j] * std::cos(mode.omega * x) +
           mode.sin_coeff[j] * std::sin(mode.omega * x));
      r.eigenrelation = std::max(
          r.eigenrelation, std::abs(second + lam * mode.evaluate(j, x)) / std::max(1.0, lam));
    }
  }
  r.norm = std::abs(inner_product(mode, mode) - 1.0);
  return r;
}

double SpectralBasis::mu1() const {
  for (const EigenMode& mode : modes)
    if (mode.eigenvalue > 1e-12) return mode.eigenvalue;
  throw std::logic_error("basis has no nonzero eigenvalue");
}

SpectralBasis build_basis(const MetricTree& tree, int N) {
  if (N < 1) throw std::invalid_argument("basis size must be at least 1");
  SpectralBasis basis;
  basis.tree = tree;
  basis.spectrum = adjacency_spectrum(tree);
  const int m = tree.edge_count();

  // Mode count up to frequency W is ~ m W / pi, so this start almost always
  // suffices; double until it does.
  double freq_max = kPi * (static_cast<double>(N) / m + 4.0);
  std::vector<EigenMode> candidates;
  for (int attempt = 0; attempt < 12; ++attempt) {
    candidates = sigma1_modes(tree, static_cast<int>(freq_max / kPi));
    std::vector<EigenMode> extra = sigma2_modes(tree, basis.spectrum, freq_max);
    for (EigenMode& e : extra) candidates.push_back(std::move(e));
    if (static_cast<int>(candidates.size()) >= N) break;
    freq_max *= 2.0;
    candidates.clear();
  }
  if (static_cast<int>(candidates.size()) < N)
    throw std::logic_error("mode enumeration failed to reach the requested size");
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const EigenMode& x, const EigenMode& y) {
                     return x.eigenvalue < y.eigenvalue;
                   });

  std::vector<EigenMode> modes;
  modes.reserve(N);
  int i = 0;
  const int total = static_cast<int>(candidates.size());
  while (static_cast<int>(modes.size()) < N && i < total) {
    int jend = i + 1;
    while (jend < total &&
           candidates[jend].eigenvalue - candidates[i].eigenvalue <=
               1e-9 * std::max(1.0, candidates[i].eigenvalue))
      ++jend;
    // Equal eigenvalues force equal frequencies: the two families never
    // collide, and distinct interior eigenvalue pairs keep their arccos sums
    // away from 2 pi multiples. Anything else is a bug, not a tolerance.
    for (int p = i; p < jend; ++p) {
      if (std::abs(candidates[p].omega - candidates[i].omega) >
          1e-9 * std::max(1.0, candidates[i].omega))
        throw std::logic_error("eigenvalue cluster mixes distinct frequencies");
      if (candidates[p].family != candidates[i].family)
        throw std::logic_error("eigenvalue collision across mode families");
    }
    if (candidates[i].family == 1 && jend - i != 1)
      throw std::logic_error("graph-independent eigenvalue with multiplicity > 1");

    const std::size_t base = modes.size();
    for (int p = i; p < jend && static_cast<int>(modes.size()) < N; ++p) {
      EigenMode mode = candidates[p];
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t q = base; q < modes.size(); ++q) {
          const double rr = inner_product(mode, modes[q]);
          for (int j = 0; j < m; ++j) {
            mode.cos_coeff[j] -= rr * modes[q].cos_coeff[j];
            mode.sin_coeff[j] -= rr * modes[q].sin_coeff[j];
          }
        }
      }
      const double nrm = std::sqrt(inner_product(mode, mode));
      if (!(nrm > 1e-10))
        throw std::logic_error("linearly dependent modes inside an eigenvalue cluster");
      for (int j = 0; j < m; ++j) {
        mode.cos_coeff[j] /= nrm;
        mode.sin_coeff[j] /= nrm;
      }
      mode.eigenvalue = candidates[i].eigenvalue;
      mode.omega = candidates[i].omega;
      modes.push_back(std::move(mode));
    }
    i = jend;
  }
  if (static_cast<int>(modes.size()) != N)
    throw std::logic_error("basis truncation failed");
  if (modes[0].family != 1 || modes[0].generator_k != 0)
    throw std::logic_error("basis does not start with the constant mode");
  basis.modes = std::move(modes);
  basis.freq_max = freq_max;
  return basis;
}

}  // namespace treespde
