#include "soris/interpolation.hpp"

#include "soris/error.hpp"

namespace soris {

FullSurfacePrediction li_baseline(const EstimatedCsi& csi, const ActiveSet& set) {
  if (set.size() < 1) throw ContractError("interpolation needs at least one estimate");
  if (csi.values.size() != set.size())
    throw ContractError("estimated CSI and active set lengths differ");
  const GridSpec& grid = set.grid();
  const int n = grid.size();
  ComplexVector field(n);
  std::vector<int> measured(n, -1);
  for (int i = 0; i < set.size(); ++i) measured[flat_offset(grid, set[i])] = i;

  for (int k = 0; k < n; ++k) {
    if (measured[k] >= 0) {
      field[k] = csi.values[measured[k]];
      continue;
    }
    const ElementIndex at = element_at(grid, k + 1);
    double wsum = 0.0;
    cdouble acc{0.0, 0.0};
    for (int i = 0; i < set.size(); ++i) {
      // Squared distance in element steps; the spacing cancels in the weights.
      const double dr = set[i].row - at.row;
      const double dc = set[i].col - at.col;
      const double w = 1.0 / (dr * dr + dc * dc);
      wsum += w;
      acc += w * csi.values[i];
    }
    field[k] = acc / wsum;
  }
  return FullSurfacePrediction::from_complex(field);
}

}  // namespace soris
