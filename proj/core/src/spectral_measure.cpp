#include "levelgauss/spectral_measure.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "levelgauss/error.hpp"
#include "levelgauss/rng.hpp"
#include "levelgauss/stats.hpp"

namespace levelgauss {

bool canonicalize_half_space(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index i = v.size() - 1; i >= 0; --i) {
    if (v(i) > 0.0) return false;
    if (v(i) < 0.0) {
      v = -v;
      return true;
    }
  }
  return false;
}

SpectralMeasure::SpectralMeasure(Eigen::MatrixXd atoms, Eigen::VectorXd weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.rows() < 1) throw InvalidInput("spectral measure: dimension must be >= 1");
  if (atoms_.cols() == 0) throw InvalidInput("spectral measure: no atoms");
  if (weights_.size() != atoms_.cols())
    throw InvalidInput("spectral measure: atom and weight counts differ");
  for (Eigen::Index k = 0; k < weights_.size(); ++k) {
    if (!(weights_(k) > 0.0) || !std::isfinite(weights_(k)))
      throw InvalidInput("spectral measure: weights must be strictly positive");
    if (!atoms_.col(k).allFinite()) throw InvalidInput("spectral measure: non-finite atom");
  }
  std::vector<double> w(weights_.data(), weights_.data() + weights_.size());
  const double total = pairwise_sum(w);
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "spectral measure: weights sum to " << total << ", expected 1";
    throw InvalidInput(os.str());
  }
  for (Eigen::Index k = 0; k < atoms_.cols(); ++k) canonicalize_half_space(atoms_.col(k));
  bool any_nonzero = false;
  for (Eigen::Index k = 0; k < atoms_.cols(); ++k) {
    any_nonzero = any_nonzero || atoms_.col(k).squaredNorm() > 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      if (atoms_.col(j) == atoms_.col(k))
        throw InvalidInput("spectral measure: atoms must be distinct up to sign");
  }
  if (!any_nonzero) throw InvalidInput("spectral measure: all atoms are zero");
}

std::size_t SpectralMeasure::find(const Eigen::VectorXd& lambda, double tol) const {
  if (lambda.size() != atoms_.rows()) return size();
  for (Eigen::Index k = 0; k < atoms_.cols(); ++k) {
    if ((atoms_.col(k) - lambda).lpNorm<Eigen::Infinity>() <= tol ||
        (atoms_.col(k) + lambda).lpNorm<Eigen::Infinity>() <= tol)
      return static_cast<std::size_t>(k);
  }
  return size();
}

bool SpectralMeasure::equivalent(const SpectralMeasure& other, double tol) const {
  if (other.dim() != dim() || other.size() != size()) return false;
  for (std::size_t k = 0; k < size(); ++k) {
    const std::size_t j = other.find(atom(k), tol);
    if (j == other.size() || std::abs(other.weight(j) - weight(k)) > tol) return false;
  }
  return true;
}

double kernel_eval(const SpectralMeasure& m, std::span<const double> t) {
  if (static_cast<int>(t.size()) != m.dim())
    throw InvalidInput("kernel_eval: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(t.size()));
  std::vector<double> terms(m.size());
  for (std::size_t k = 0; k < m.size(); ++k)
    terms[k] = m.weight(k) * std::cos(m.atoms().col(static_cast<Eigen::Index>(k)).dot(tv));
  return pairwise_sum(terms);
}

namespace {

void enumerate_multi_indices(int dim, int order, std::vector<std::vector<int>>& out) {
  std::vector<int> alpha(static_cast<std::size_t>(dim), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == dim - 1) {
      alpha[static_cast<std::size_t>(pos)] = left;
      out.push_back(alpha);
      return;
    }
    for (int a = left; a >= 0; --a) {
      alpha[static_cast<std::size_t>(pos)] = a;
      rec(pos + 1, left - a);
    }
  };
  rec(0, order);
}

}  // namespace

SpectralMoments second_moments(const SpectralMeasure& m) {
  SpectralMoments out;
  const int d = m.dim();
  out.second_moment = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Eigen::VectorXd a = m.atom(k);
    out.second_moment.noalias() += m.weight(k) * (a * a.transpose());
  }
  for (int order = 0; order <= 4; ++order) {
    std::vector<std::vector<int>> indices;
    enumerate_multi_indices(d, order, indices);
    for (auto& alpha : indices) {
      double v = 0.0;
      for (std::size_t k = 0; k < m.size(); ++k) {
        double p = m.weight(k);
        for (int i = 0; i < d; ++i)
          p *= std::pow(m.atoms()(i, static_cast<Eigen::Index>(k)), alpha[static_cast<std::size_t>(i)]);
        v += p;
      }
      out.moments.push_back({std::move(alpha), v});
    }
  }
  return out;
}

NondegeneracyReport validate_nondegenerate(const SpectralMeasure& m) {
  NondegeneracyReport rep;
  const int d = m.dim();
  const Eigen::MatrixXd lambda = second_moments(m).second_moment;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lambda);
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  const double scale = std::max(lambda.trace(), 1e-300);
  if (!(rep.min_eigenvalue > 1e-12 * scale))
    rep.failures.emplace_back("second moment matrix is not positive definite");

  for (std::size_t k = 0; k < m.size(); ++k)
    rep.symmetric_atom_count += m.atom(k).squaredNorm() > 0.0 ? 2 : 1;
  if (rep.symmetric_atom_count < static_cast<std::size_t>(d + 1))
    rep.failures.emplace_back("fewer than d+1 atoms counting +- pairs");

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(m.atoms());
  if (lu.rank() < d) rep.failures.emplace_back("atoms lie in a proper linear subspace");

  rep.passed = rep.failures.empty();
  return rep;
}

SpectralMeasure rpw_circle(int M) {
  if (M < 2) throw InvalidInput("rpw_circle: M must be >= 2");
  Eigen::MatrixXd atoms(2, M);
  for (int k = 0; k < M; ++k) {
    const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(M);
    atoms(0, k) = std::cos(theta);
    atoms(1, k) = std::sin(theta);
  }
  // sin(0) is exact; cos(pi/2) is not, which is harmless.
  return SpectralMeasure(std::move(atoms), Eigen::VectorXd::Constant(M, 1.0 / M));
}

SpectralMeasure bargmann_fock(int M, double r_max, int radial_nodes) {
  if (M < 2) throw InvalidInput("bargmann_fock: M must be >= 2");
  if (radial_nodes < 1) throw InvalidInput("bargmann_fock: radial_nodes must be >= 1");
  if (!(r_max > 0.0)) throw InvalidInput("bargmann_fock: r_max must be positive");
  auto [r, gw] = gauss_legendre(static_cast<std::size_t>(radial_nodes), 0.0, r_max);
  std::vector<double> radial(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) radial[i] = gw[i] * r[i] * std::exp(-0.5 * r[i] * r[i]);
  const double norm = pairwise_sum(radial);

  const Eigen::Index n = static_cast<Eigen::Index>(M) * radial_nodes;
  Eigen::MatrixXd atoms(2, n);
  Eigen::VectorXd weights(n);
  Eigen::Index col = 0;
  for (int i = 0; i < radial_nodes; ++i) {
    for (int j = 0; j < M; ++j, ++col) {
      const double theta = std::numbers::pi * static_cast<double>(j) / static_cast<double>(M);
      atoms(0, col) = r[static_cast<std::size_t>(i)] * std::cos(theta);
      atoms(1, col) = r[static_cast<std::size_t>(i)] * std::sin(theta);
      weights(col) = radial[static_cast<std::size_t>(i)] / norm / static_cast<double>(M);
    }
  }
  // Renormalise so the weights sum to one to the last bit the sum allows.
  std::vector<double> w(weights.data(), weights.data() + n);
  weights /= pairwise_sum(w);
  return SpectralMeasure(std::move(atoms), std::move(weights));
}

double bargmann_fock_continuum_moment(double r_max) {
  // int_0^R r^3 e^{-r^2/2} dr = 2 - (R^2 + 2) e^{-R^2/2};  int_0^R r e^{-r^2/2} dr = 1 - e^{-R^2/2}.
  const double e = std::exp(-0.5 * r_max * r_max);
  return 0.5 * (2.0 - (r_max * r_max + 2.0) * e) / (1.0 - e);
}

SpectralMeasure atomic_measure(
    const std::vector<std::pair<std::vector<double>, double>>& atoms_and_weights) {
  if (atoms_and_weights.empty()) throw InvalidInput("atomic_measure: empty atom list");
  const std::size_t d = atoms_and_weights.front().first.size();
  Eigen::MatrixXd atoms(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(atoms_and_weights.size()));
  Eigen::VectorXd weights(static_cast<Eigen::Index>(atoms_and_weights.size()));
  for (std::size_t k = 0; k < atoms_and_weights.size(); ++k) {
    const auto& [a, w] = atoms_and_weights[k];
    if (a.size() != d) throw InvalidInput("atomic_measure: atoms have different dimensions");
    for (std::size_t i = 0; i < d; ++i)
      atoms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = a[i];
    weights(static_cast<Eigen::Index>(k)) = w;
  }
  return SpectralMeasure(std::move(atoms), std::move(weights));
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

int int_param(const std::map<std::string, double>& p, const std::string& key, int fallback) {
  const double v = param(p, key, fallback);
  if (v != std::floor(v)) throw InvalidInput("builtin measure: parameter '" + key + "' must be an integer");
  return static_cast<int>(v);
}

}  // namespace

SpectralMeasure builtin_measure(std::string_view name, const std::map<std::string, double>& params) {
  if (name == "rpw_circle") {
    if (!params.contains("M")) throw InvalidInput("rpw_circle: missing parameter M");
    return rpw_circle(int_param(params, "M", 0));
  }
  if (name == "bargmann_fock") {
    if (!params.contains("M")) throw InvalidInput("bargmann_fock: missing parameter M");
    return bargmann_fock(int_param(params, "M", 0), param(params, "r_max", 5.0),
                         int_param(params, "radial_nodes", 16));
  }
  throw InvalidInput("unknown builtin measure '" + std::string(name) + "'");
}

SpectralMeasure dilate(const SpectralMeasure& m, double factor) {
  if (!(factor > 0.0)) throw InvalidInput("dilate: factor must be positive");
  return SpectralMeasure(m.atoms() * factor, m.weights());
}

SpectralMeasure angular_jitter(const SpectralMeasure& m, double eps, std::uint64_t key) {
  if (m.dim() != 2) throw InvalidInput("angular_jitter: only d = 2 is supported");
  const CounterRng rng(key);
  Eigen::MatrixXd atoms = m.atoms();
  for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
    const double u = 2.0 * rng.uniform(0, static_cast<std::uint64_t>(k)) - 1.0;
    const double c = std::cos(eps * u), s = std::sin(eps * u);
    const double x = atoms(0, k), y = atoms(1, k);
    atoms(0, k) = c * x - s * y;
    atoms(1, k) = s * x + c * y;
  }
  return SpectralMeasure(std::move(atoms), m.weights());
}

}  // namespace levelgauss
