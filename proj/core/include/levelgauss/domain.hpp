#pragma once

#include <vector>

namespace levelgauss {

/// The cube D = [-R, R]^d sampled by grid_n points per axis.
struct Domain {
  double R = 1.0;
  int dim = 2;
  int grid_n = 256;

  /// Throws InvalidInput unless R > 0, dim >= 2 and grid_n >= 16.
  void validate() const;

  double spacing() const { return 2.0 * R / static_cast<double>(grid_n - 1); }
  double volume() const;  // (2R)^d
  /// grid_n equispaced nodes from -R to R (endpoints exact).
  std::vector<double> nodes() const;
  /// grid_n - 1 cell midpoints.
  std::vector<double> cell_centers() const;
};

/// n equispaced points covering [-R, R] with both endpoints, n >= 2.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace levelgauss
