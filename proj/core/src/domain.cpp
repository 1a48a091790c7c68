#include "levelgauss/domain.hpp"

#include <cmath>

#include "levelgauss/error.hpp"

namespace levelgauss {

void Domain::validate() const {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidInput("domain: R must be positive");
  if (dim < 2) throw InvalidInput("domain: dim must be >= 2");
  if (grid_n < 16) throw InvalidInput("domain: grid_n must be >= 16");
}

double Domain::volume() const { return std::pow(2.0 * R, dim); }

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw InvalidInput("linspace: need at least two points");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + h * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<double> Domain::nodes() const { return linspace(-R, R, grid_n); }

std::vector<double> Domain::cell_centers() const {
  const std::vector<double> x = nodes();
  std::vector<double> c(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) c[i] = 0.5 * (x[i] + x[i + 1]);
  return c;
}

}  // namespace levelgauss
