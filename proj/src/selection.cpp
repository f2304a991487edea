#include "soris/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "soris/error.hpp"

namespace soris {

ActiveSet::ActiveSet(GridSpec grid, std::vector<ElementIndex> elements)
    : grid_(grid), elements_(std::move(elements)) {
  if (elements_.empty()) throw ConfigError("active set is empty");
  std::set<ElementIndex> seen;
  for (const auto& e : elements_) {
    check_bounds(grid_, e);
    if (!seen.insert(e).second)
      throw ConfigError("active set lists element (" + std::to_string(e.row) +
                        "," + std::to_string(e.col) + ") twice");
  }
}

std::vector<int> ActiveSet::offsets() const {
  std::vector<int> out;
  out.reserve(elements_.size());
  for (const auto& e : elements_) out.push_back(flat_offset(grid_, e));
  return out;
}

bool ActiveSet::contains(ElementIndex idx) const {
  return std::find(elements_.begin(), elements_.end(), idx) != elements_.end();
}

void ActiveSet::require_proper() const {
  if (size() >= grid_.size())
    throw ConfigError("active set of size " + std::to_string(size()) +
                      " leaves nothing to predict on a " +
                      std::to_string(grid_.size()) + "-element surface");
}

namespace {

using Listing = std::vector<ElementIndex>;

const std::map<std::string, Listing, std::less<>>& preset_table() {
  static const std::map<std::string, Listing, std::less<>> table = {
      {"p4-set1", {{1, 1}, {1, 8}, {8, 1}, {8, 8}}},
      {"p4-set2", {{1, 4}, {4, 1}, {4, 8}, {8, 4}}},
      {"p4-set3", {{4, 4}, {4, 5}, {5, 4}, {5, 5}}},
      {"p4-set4", {{2, 2}, {2, 7}, {7, 2}, {7, 7}}},
      {"p8-set1", {{1, 1}, {1, 8}, {4, 4}, {4, 5}, {5, 4}, {5, 5}, {8, 1}, {8, 8}}},
      {"p8-set2", {{1, 1}, {1, 4}, {1, 8}, {4, 1}, {4, 8}, {8, 1}, {8, 4}, {8, 8}}},
      {"p8-set3", {{2, 2}, {2, 4}, {2, 7}, {4, 2}, {5, 7}, {7, 2}, {7, 5}, {7, 7}}},
      {"p8-set4", {{2, 2}, {2, 7}, {4, 4}, {4, 5}, {5, 4}, {5, 5}, {7, 2}, {7, 7}}},
      {"p4-fig10", {{1, 1}, {1, 8}, {8, 1}, {8, 8}}},
      {"p8-fig10", {{1, 1}, {1, 8}, {3, 3}, {3, 6}, {6, 3}, {6, 6}, {8, 1}, {8, 8}}},
      {"p16-fig10",
       {{2, 2}, {2, 4}, {2, 6}, {2, 8}, {4, 2}, {4, 4}, {4, 6}, {4, 8},
        {6, 2}, {6, 4}, {6, 6}, {6, 8}, {8, 2}, {8, 4}, {8, 6}, {8, 8}}},
      {"p32-fig10",
       {{1, 2}, {1, 4}, {1, 6}, {1, 8}, {2, 1}, {2, 3}, {2, 5}, {2, 7},
        {3, 2}, {3, 4}, {3, 6}, {3, 8}, {4, 1}, {4, 3}, {4, 5}, {4, 7},
        {5, 2}, {5, 4}, {5, 6}, {5, 8}, {6, 1}, {6, 3}, {6, 5}, {6, 7},
        {7, 2}, {7, 4}, {7, 6}, {7, 8}, {8, 1}, {8, 3}, {8, 5}, {8, 7}}},
  };
  return table;
}

// Values closer than this are treated as ties so the flat-index order
// decides instead of summation round-off.
constexpr double kTieTolerance = 1e-12;

}  // namespace

ActiveSet preset_set(std::string_view name, const GridSpec& grid) {
  const auto& table = preset_table();
  auto it = table.find(name);
  if (it == table.end()) {
    std::string known;
    for (const auto& [id, _] : table) known += (known.empty() ? "" : ", ") + id;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " +
                      known + ")");
  }
  if (grid.rows != 8 || grid.cols != 8)
    throw ConfigError("preset '" + std::string(name) +
                      "' is defined for 8x8 surfaces, not " +
                      std::to_string(grid.rows) + "x" + std::to_string(grid.cols));
  return ActiveSet(grid, it->second);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [id, _] : preset_table()) out.push_back(id);
  return out;
}

ActiveSet select_min_correlation(const CorrelationModel& corr, int n_f) {
  const int n = corr.size();
  if (n_f < 1 || n_f >= n)
    throw ConfigError("min-correlation selection needs 1 <= N_f < " +
                      std::to_string(n) + ", got " + std::to_string(n_f));
  const RealMatrix a = corr.matrix.cwiseAbs();

  int seed = 0;
  double best = a.row(0).sum();
  for (int k = 1; k < n; ++k) {
    const double s = a.row(k).sum();
    if (s < best - kTieTolerance) {
      best = s;
      seed = k;
    }
  }

  std::vector<int> chosen{seed};
  std::vector<bool> taken(n, false);
  taken[seed] = true;
  // worst[k] = max |c| between k and the chosen elements
  RealVector worst = a.col(seed);
  while (static_cast<int>(chosen.size()) < n_f) {
    int pick = -1;
    double pick_val = 0.0;
    for (int k = 0; k < n; ++k) {
      if (taken[k]) continue;
      if (pick < 0 || worst[k] < pick_val - kTieTolerance) {
        pick = k;
        pick_val = worst[k];
      }
    }
    chosen.push_back(pick);
    taken[pick] = true;
    worst = worst.cwiseMax(a.col(pick));
  }

  std::vector<ElementIndex> elems;
  for (int k : chosen) elems.push_back(element_at(corr.grid, k + 1));
  return ActiveSet(corr.grid, std::move(elems));
}

int default_diagonal_start(const GridSpec& grid) {
  const int m = std::min(grid.rows, grid.cols);
  return std::max(1, (m + 3) / 4);
}

int diagonal_step(const CorrelationModel& corr, int start) {
  const GridSpec& grid = corr.grid;
  const int origin = flat_offset(grid, {start, start});
  for (int step = 1; start + step <= grid.cols; ++step) {
    if (std::abs(corr.matrix(origin, origin + step)) < 0.1) return step;
  }
  return 0;
}

ActiveSet select_diagonal(const GridSpec& grid, const CorrelationModel& corr,
                          int n_f, std::optional<int> start) {
  const int n = grid.size();
  if (n_f < 1 || n_f >= n)
    throw ConfigError("diagonal selection needs 1 <= N_f < " +
                      std::to_string(n) + ", got " + std::to_string(n_f));
  if (!(corr.grid == grid) || corr.size() != n)
    throw ConfigError("correlation model does not match the grid");
  const int k = start.value_or(default_diagonal_start(grid));
  if (k < 1 || k > std::min(grid.rows, grid.cols))
    throw ConfigError("diagonal start " + std::to_string(k) +
                      " must lie on the main diagonal");

  const int step = diagonal_step(corr, k);

  std::vector<ElementIndex> out{{k, k}};
  if (n_f == 1) return ActiveSet(grid, out);
  if (step == 0)
    throw SelectionInfeasibleError(
        "no element on row " + std::to_string(k) +
        " decorrelates below 0.1 from the start element; use a smaller N_f "
        "or a larger surface");

  struct LatticePoint {
    int nv, nh;
  };
  std::vector<LatticePoint> lattice;
  for (int nv = 0; k + nv * step <= grid.rows; ++nv)
    for (int nh = 0; k + nh * step <= grid.cols; ++nh)
      if (nv + nh > 0) lattice.push_back({nv, nh});
  std::stable_sort(lattice.begin(), lattice.end(),
                   [](const LatticePoint& a, const LatticePoint& b) {
                     if (a.nv + a.nh != b.nv + b.nh) return a.nv + a.nh < b.nv + b.nh;
                     return a.nv < b.nv;
                   });

  auto taken = [&](ElementIndex e) {
    return std::find(out.begin(), out.end(), e) != out.end();
  };
  for (const auto& p : lattice) {
    if (static_cast<int>(out.size()) == n_f) break;
    const ElementIndex base{k + p.nv * step, k + p.nh * step};
    bool shares_row = false, shares_col = false;
    for (const auto& e : out) {
      shares_row |= e.row == base.row;
      shares_col |= e.col == base.col;
    }
    ElementIndex cand = base;
    if (shares_col && cand.col + 1 <= grid.cols) ++cand.col;
    if (shares_row && cand.row + 1 <= grid.rows) ++cand.row;
    if (taken(cand)) cand = base;
    if (taken(cand)) continue;
    out.push_back(cand);
  }
  if (static_cast<int>(out.size()) < n_f)
    throw SelectionInfeasibleError(
        "diagonal lattice with step " + std::to_string(step) + " yields only " +
        std::to_string(out.size()) + " elements, " + std::to_string(n_f) +
        " requested; use a smaller N_f or a denser lattice");
  return ActiveSet(grid, std::move(out));
}

}  // namespace soris
