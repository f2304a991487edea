#pragma once

#include <compare>
#include <cstddef>

#include "soris/types.hpp"

namespace soris {

// Planar metasurface of rows x cols elements at uniform spacing.
struct GridSpec {
  int rows = 8;
  int cols = 8;
  double spacing = 0.005;     // meters
  double wavelength = 0.01;   // meters

  // Spacing given as a fraction of the wavelength.
  static GridSpec from_fraction(int rows, int cols, double spacing_frac,
                                double wavelength = 0.01);

  int size() const noexcept { return rows * cols; }
  double spacing_fraction() const noexcept { return spacing / wavelength; }

  // Throws ConfigError when a dimension or length is not positive.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// 1-based (row, col) address. Flattening is row-major: (row-1)*cols + col.
struct ElementIndex {
  int row = 1;
  int col = 1;

  friend auto operator<=>(const ElementIndex&, const ElementIndex&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

bool in_bounds(const GridSpec& grid, ElementIndex idx) noexcept;

// Throws BoundsError when idx lies outside the grid.
void check_bounds(const GridSpec& grid, ElementIndex idx);

// 1-based flat index in [1, N].
int flat_index(const GridSpec& grid, ElementIndex idx);
// 0-based offset into flat vectors, flat_index - 1.
inline int flat_offset(const GridSpec& grid, ElementIndex idx) {
  return flat_index(grid, idx) - 1;
}
ElementIndex element_at(const GridSpec& grid, int flat);

Point2 element_position(const GridSpec& grid, ElementIndex idx);
double pairwise_distance(const GridSpec& grid, ElementIndex a, ElementIndex b);

// Normalized sinc, sin(pi x)/(pi x), with sinc(0) = 1.
double sinc(double x);

// Spatial correlation sinc(2 d / lambda) between two elements.
double correlation(const GridSpec& grid, ElementIndex a, ElementIndex b);

// Correlation matrix C and a factor L with L L^T = C, where negative
// eigenvalues produced by round-off are clamped to zero first.
struct CorrelationModel {
  GridSpec grid;
  RealMatrix matrix;
  RealMatrix sqrt_factor;
  // Sum of |lambda_i| over the clamped negative eigenvalues.
  double clamped_mass = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;

  int size() const noexcept { return static_cast<int>(matrix.rows()); }
  // L L^T, i.e. C after eigenvalue clamping.
  RealMatrix clamped() const { return sqrt_factor * sqrt_factor.transpose(); }
};

// Fills C over all element pairs in flat order.
RealMatrix correlation_values(const GridSpec& grid,
                              Execution exec = Execution::parallel);

CorrelationModel correlation_matrix(const GridSpec& grid,
                                    Execution exec = Execution::parallel);

}  // namespace soris
