#pragma once

// Dense linear assignment by the Jonker-Volgenant algorithm: column
// reduction, reduction transfer, two augmenting-row-reduction sweeps, then
// shortest augmenting paths with dual updates. Exact optimum for square
// double-valued cost matrices.

#include <vector>

#include "sdstein/types.hpp"

namespace sdstein {

struct AssignmentResult {
  std::vector<int> row_to_col;
  double cost = 0.0;
};

AssignmentResult solve_assignment(const Mat& cost);

}  // namespace sdstein
