#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace levelgauss {

/// Finite symmetric atomic spectral measure normalised to total mass one.
///
/// Only one representative of every +/- pair is stored. Representatives are
/// canonicalised into the upper half space (last nonzero coordinate
/// positive), so symmetry holds by construction and the covariance kernel is
/// K(t) = sum_k w_k cos<lambda_k, t>.
class SpectralMeasure {
 public:
  /// `atoms` is dim x n (one atom per column). Throws InvalidInput if the
  /// weights are not strictly positive, do not sum to one within 1e-12, if
  /// two atoms coincide up to sign, or if every atom is zero.
  SpectralMeasure(Eigen::MatrixXd atoms, Eigen::VectorXd weights);

  int dim() const noexcept { return static_cast<int>(atoms_.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(atoms_.cols()); }
  const Eigen::MatrixXd& atoms() const noexcept { return atoms_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  Eigen::VectorXd atom(std::size_t k) const { return atoms_.col(static_cast<Eigen::Index>(k)); }
  double weight(std::size_t k) const { return weights_(static_cast<Eigen::Index>(k)); }

  /// Index of the atom equal to +-lambda, or size() when absent.
  std::size_t find(const Eigen::VectorXd& lambda, double tol = 0.0) const;

  /// Same atom set (up to sign and order) with the same weights.
  bool equivalent(const SpectralMeasure& other, double tol = 1e-12) const;

 private:
  Eigen::MatrixXd atoms_;
  Eigen::VectorXd weights_;
};

/// Flip `v` into the canonical half space. Returns true if it was negated.
bool canonicalize_half_space(Eigen::Ref<Eigen::VectorXd> v);

struct MultiIndexMoment {
  std::vector<int> alpha;  // exponent per coordinate
  double value = 0.0;      // sum_k w_k prod_i lambda_{k,i}^alpha_i
};

struct SpectralMoments {
  Eigen::MatrixXd second_moment;              // Lambda = sum_k w_k lambda_k lambda_k^T
  std::vector<MultiIndexMoment> moments;      // all |alpha| <= 4, graded lexicographic
};

/// K(t) = sum_k w_k cos<lambda_k, t>.
double kernel_eval(const SpectralMeasure& m, std::span<const double> t);

SpectralMoments second_moments(const SpectralMeasure& m);

struct NondegeneracyReport {
  bool passed = false;
  double min_eigenvalue = 0.0;           // of Lambda
  std::size_t symmetric_atom_count = 0;  // counting +- pairs
  std::vector<std::string> failures;
};

/// Passes iff Lambda is positive definite, the symmetric atom count is at
/// least d + 1 and the atoms are not contained in a proper linear subspace.
NondegeneracyReport validate_nondegenerate(const SpectralMeasure& m);

/// Equally spaced atoms at angles k*pi/M, k = 0..M-1, on the unit circle.
SpectralMeasure rpw_circle(int M);

/// Deterministic polar quadrature of the Gaussian spectral density
/// exp(-|lambda|^2/2): Gauss-Legendre nodes on [0, r_max] for the radial
/// density r exp(-r^2/2) times M equally spaced half-circle angles.
SpectralMeasure bargmann_fock(int M, double r_max = 5.0, int radial_nodes = 16);

/// Radial second moment c of the continuous truncated Bargmann-Fock density,
/// Lambda = c I. Used to compare against the discretisation.
double bargmann_fock_continuum_moment(double r_max);

SpectralMeasure atomic_measure(
    const std::vector<std::pair<std::vector<double>, double>>& atoms_and_weights);

/// Builtins by name: "rpw_circle" {M}, "bargmann_fock" {M, r_max, radial_nodes}.
/// Explicit atom lists go through atomic_measure.
SpectralMeasure builtin_measure(std::string_view name, const std::map<std::string, double>& params);

/// Every atom multiplied by `factor` (weights unchanged).
SpectralMeasure dilate(const SpectralMeasure& m, double factor);

/// d = 2 only: atom k rotated by eps * u_k with u_k uniform in [-1, 1],
/// drawn from a counter RNG keyed by `key`.
SpectralMeasure angular_jitter(const SpectralMeasure& m, double eps, std::uint64_t key);

}  // namespace levelgauss
