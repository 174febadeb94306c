#pragma once

#include <vector>

#include "treespde/graph.hpp"

namespace treespde {

// Eigenvalue cluster of the normalized adjacency D^{-1}A. `vectors` are
// right eigenvectors U (A~ U = mu U); the zero cluster carries the exact
// kernel basis rows instead of floating eigenvectors, so the simulated
// zero-mode structure and the exact Feller decision share one object.
struct AdjacencyEigenGroup {
  double mu = 0.0;
  bool zero_group = false;
  std::vector<std::vector<double>> vectors;
};

struct AdjacencySpectrum {
  std::vector<double> eigenvalues;          // n values, ascending
  std::vector<AdjacencyEigenGroup> groups;  // ascending mu
};

// Cyclic Jacobi eigendecomposition of a dense symmetric matrix. Eigenvalues
// ascending; eigenvectors[i] is the eigenvector (row-major columns of the
// accumulated rotation) for eigenvalues[i], orthonormal.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors);

AdjacencySpectrum adjacency_spectrum(const MetricTree& tree);

// One Laplacian eigenfunction in closed form: on edge j it equals
// cos_coeff[j] cos(omega x) + sin_coeff[j] sin(omega x).
struct EigenMode {
  double eigenvalue = 0.0;  // omega^2, eigenvalue of the negative Laplacian
  double omega = 0.0;
  int family = 1;            // 1: graph-independent cosines; 2: adjacency-generated
  int generator_k = 0;       // family 1: harmonic index
  double generator_mu = 0.0; // family 2: adjacency eigenvalue
  int group_index = -1;      // family 2: adjacency group in the spectrum
  int column_index = -1;     // family 2: leading vector within the group
  std::vector<double> cos_coeff;
  std::vector<double> sin_coeff;

  double evaluate(int j, double x) const;
  double derivative(int j, double x) const;
};

// Graph-independent modes k = 0..k_max: constants and +-cos(k pi x) with
// signs from the bipartition for odd k.
std::vector<EigenMode> sigma1_modes(const MetricTree& tree, int k_max);

// Adjacency-generated modes: for each eigenvalue mu strictly inside (-1,1)
// and each omega in {arccos mu + 2 l pi, (2 pi - arccos mu) + 2 l pi} up to
// freq_max, one mode per eigenvector, interpolating the vertex values.
std::vector<EigenMode> sigma2_modes(const MetricTree& tree,
                                    const AdjacencySpectrum& spectrum,
                                    double freq_max);

// Normalized mode interpolating the given vertex values at frequency omega;
// requires sin(omega) away from zero and a nonzero value vector.
EigenMode make_vertex_mode(const MetricTree& tree, const std::vector<double>& values,
                           double omega);

// Admissible frequencies for an interior adjacency eigenvalue, ascending,
// all <= freq_max.
std::vector<double> admissible_frequencies(double mu, double freq_max);

// L2 inner products over one edge / the whole graph, closed trigonometric
// forms; the quadrature version is the independent cross-check.
double edge_inner_product(const EigenMode& f, const EigenMode& g, int j);
double inner_product(const EigenMode& f, const EigenMode& g);
double inner_product_quadrature(const EigenMode& f, const EigenMode& g, int nodes);

struct ModeResiduals {
  double continuity;     // max vertex-value spread over incident edges
  double kirchhoff;      // max |sum of signed endpoint derivatives|
  double eigenrelation;  // max |phi'' + eigenvalue phi| / max(1, eigenvalue)
  double norm;           // |<phi,phi> - 1|
};
ModeResiduals mode_residuals(const MetricTree& tree, const EigenMode& mode);

// First N eigenmodes by ascending eigenvalue, orthonormalized within each
// repeated eigenvalue (Gram-Schmidt mixes only same-frequency modes, so the
// closed form survives). modes[0] is the constant 1/sqrt(m).
struct SpectralBasis {
  MetricTree tree;
  AdjacencySpectrum spectrum;
  std::vector<EigenMode> modes;
  double freq_max = 0.0;

  int size() const { return static_cast<int>(modes.size()); }
  double eigenvalue(int k) const { return modes[k].eigenvalue; }
  // Smallest nonzero eigenvalue in the basis.
  double mu1() const;
};

SpectralBasis build_basis(const MetricTree& tree, int N);

}  // namespace treespde
