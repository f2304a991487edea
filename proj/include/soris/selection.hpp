#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "soris/geometry.hpp"

namespace soris {

// Ordered set of elements switched to transmission mode.
class ActiveSet {
public:
  ActiveSet() = default;
  // Throws BoundsError for out-of-grid elements and ConfigError for an empty
  // list or duplicates.
  ActiveSet(GridSpec grid, std::vector<ElementIndex> elements);

  const GridSpec& grid() const noexcept { return grid_; }
  const std::vector<ElementIndex>& elements() const noexcept { return elements_; }
  int size() const noexcept { return static_cast<int>(elements_.size()); }
  const ElementIndex& operator[](int i) const { return elements_[i]; }

  // 0-based flat offsets in set order.
  std::vector<int> offsets() const;
  bool contains(ElementIndex idx) const;

  // A selection must leave at least one element to predict: |S| < N.
  void require_proper() const;

private:
  GridSpec grid_;
  std::vector<ElementIndex> elements_;
};

// Ids: p4-set1..4, p8-set1..4, p4-fig10, p8-fig10, p16-fig10, p32-fig10.
// All presets are defined for 8x8 grids only.
ActiveSet preset_set(std::string_view name, const GridSpec& grid);
std::vector<std::string> preset_names();

// Greedy min-max |c| selection seeded with the smallest |c| row sum.
ActiveSet select_min_correlation(const CorrelationModel& corr, int n_f);

// Lattice walk from (k,k) along the main diagonal with step K chosen as the
// first offset whose |c| drops below 0.1. `start` overrides k.
ActiveSet select_diagonal(const GridSpec& grid, const CorrelationModel& corr,
                          int n_f, std::optional<int> start = std::nullopt);

// Step K used by select_diagonal for a start element (k,k).
int diagonal_step(const CorrelationModel& corr, int start);
int default_diagonal_start(const GridSpec& grid);

}  // namespace soris
