#include "soris/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "soris/error.hpp"

namespace soris {

GridSpec GridSpec::from_fraction(int rows, int cols, double spacing_frac,
                                 double wavelength) {
  GridSpec g{rows, cols, spacing_frac * wavelength, wavelength};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (rows < 1 || cols < 1)
    throw ConfigError("grid needs at least one row and one column, got " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  if (!(spacing > 0.0)) throw ConfigError("element spacing must be positive");
  if (!(wavelength > 0.0)) throw ConfigError("wavelength must be positive");
}

bool in_bounds(const GridSpec& grid, ElementIndex idx) noexcept {
  return idx.row >= 1 && idx.row <= grid.rows && idx.col >= 1 &&
         idx.col <= grid.cols;
}

void check_bounds(const GridSpec& grid, ElementIndex idx) {
  if (!in_bounds(grid, idx))
    throw BoundsError("element (" + std::to_string(idx.row) + "," +
                      std::to_string(idx.col) + ") outside " +
                      std::to_string(grid.rows) + "x" +
                      std::to_string(grid.cols) + " grid");
}

int flat_index(const GridSpec& grid, ElementIndex idx) {
  check_bounds(grid, idx);
  return (idx.row - 1) * grid.cols + idx.col;
}

ElementIndex element_at(const GridSpec& grid, int flat) {
  if (flat < 1 || flat > grid.size())
    throw BoundsError("flat index " + std::to_string(flat) + " outside [1, " +
                      std::to_string(grid.size()) + "]");
  return {(flat - 1) / grid.cols + 1, (flat - 1) % grid.cols + 1};
}

Point2 element_position(const GridSpec& grid, ElementIndex idx) {
  check_bounds(grid, idx);
  return {(idx.col - 1) * grid.spacing, (idx.row - 1) * grid.spacing};
}

double pairwise_distance(const GridSpec& grid, ElementIndex a, ElementIndex b) {
  check_bounds(grid, a);
  check_bounds(grid, b);
  // Integer offsets keep the result a pure function of the displacement.
  const double dr = b.row - a.row;
  const double dc = b.col - a.col;
  return std::hypot(dr, dc) * grid.spacing;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

double correlation(const GridSpec& grid, ElementIndex a, ElementIndex b) {
  if (a == b) {
    check_bounds(grid, a);
    return 1.0;
  }
  return sinc(2.0 * pairwise_distance(grid, a, b) / grid.wavelength);
}

RealMatrix correlation_values(const GridSpec& grid, Execution exec) {
  grid.validate();
  const int n = grid.size();
  RealMatrix c(n, n);
  // One evaluation per unordered pair; the mirror copy keeps C symmetric
  // bit for bit.
  auto fill_row = [&](int k) {
    const ElementIndex a = element_at(grid, k + 1);
    c(k, k) = 1.0;
    for (int m = k + 1; m < n; ++m) {
      const double v = correlation(grid, a, element_at(grid, m + 1));
      c(k, m) = v;
      c(m, k) = v;
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (int k = 0; k < n; ++k) fill_row(k);
  } else {
    for (int k = 0; k < n; ++k) fill_row(k);
  }
  return c;
}

CorrelationModel correlation_matrix(const GridSpec& grid, Execution exec) {
  CorrelationModel model;
  model.grid = grid;
  model.matrix = correlation_values(grid, exec);

  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(model.matrix);
  if (eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the " +
                         std::to_string(grid.size()) +
                         "-element correlation matrix did not converge");
  RealVector lambda = eig.eigenvalues();
  model.min_eigenvalue = lambda.minCoeff();
  model.max_eigenvalue = lambda.maxCoeff();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < 0.0) {
      model.clamped_mass += -lambda[i];
      lambda[i] = 0.0;
    }
  }
  model.sqrt_factor =
      eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
  return model;
}

}  // namespace soris
