#include "sdstein/assignment.hpp"

#include <limits>

#include "sdstein/errors.hpp"

namespace sdstein {

AssignmentResult solve_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n || n == 0) throw Error("solve_assignment: square matrix required");

  std::vector<int> x(n, -1);  // row -> col
  std::vector<int> y(n, -1);  // col -> row
  std::vector<double> v(n, 0.0);
  std::vector<int> free_rows;
  free_rows.reserve(n);

  // column reduction
  {
    std::vector<int> matches(n, 0);
    for (int j = n - 1; j >= 0; --j) {
      double min = cost(0, j);
      int imin = 0;
      for (int i = 1; i < n; ++i) {
        if (cost(i, j) < min) {
          min = cost(i, j);
          imin = i;
        }
      }
      v[j] = min;
      if (++matches[imin] == 1) {
        x[imin] = j;
        y[j] = imin;
      } else {
        y[j] = -1;
      }
    }
    // reduction transfer for rows assigned exactly once
    for (int i = 0; i < n; ++i) {
      if (matches[i] == 0) {
        free_rows.push_back(i);
      } else if (matches[i] == 1) {
        const int j1 = x[i];
        double min = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
          if (j != j1) min = std::min(min, cost(i, j) - v[j]);
        }
        v[j1] -= min;
      }
    }
  }

  // Two sweeps of augmenting row reduction. On real-valued degenerate costs
  // (duplicate points) the in-place rescan can cycle with ever-smaller dual
  // decrements, so the sweep is capped; leftover rows fall through to the
  // augmenting-path stage, which terminates structurally.
  for (int sweep = 0; sweep < 2 && !free_rows.empty(); ++sweep) {
    std::vector<int> next_free;
    std::size_t k = 0;
    long long budget = 8 * static_cast<long long>(n);
    while (k < free_rows.size()) {
      if (--budget < 0) {
        while (k < free_rows.size()) next_free.push_back(free_rows[k++]);
        break;
      }
      const int i = free_rows[k++];
      double umin = cost(i, 0) - v[0], usubmin = std::numeric_limits<double>::infinity();
      int j1 = 0, j2 = -1;
      for (int j = 1; j < n; ++j) {
        const double h = cost(i, j) - v[j];
        if (h < usubmin) {
          if (h >= umin) {
            usubmin = h;
            j2 = j;
          } else {
            usubmin = umin;
            umin = h;
            j2 = j1;
            j1 = j;
          }
        }
      }
      int i0 = y[j1];
      bool improved = false;
      if (umin < usubmin) {
        // a decrement absorbed by rounding is not progress
        const double v_new = v[j1] - (usubmin - umin);
        improved = v_new < v[j1];
        v[j1] = v_new;
      } else if (i0 >= 0) {
        j1 = j2;
        i0 = y[j1];
      }
      x[i] = j1;
      y[j1] = i;
      if (i0 >= 0) {
        if (improved) {
          free_rows[--k] = i0;  // rescan the displaced row in place
        } else {
          next_free.push_back(i0);
        }
      }
    }
    free_rows = std::move(next_free);
  }

  // shortest augmenting paths for the remaining free rows
  std::vector<double> d(n);
  std::vector<int> pred(n), collist(n);
  for (const int f : free_rows) {
    for (int j = 0; j < n; ++j) {
      d[j] = cost(f, j) - v[j];
      pred[j] = f;
      collist[j] = j;
    }
    int low = 0, up = 0, last = -1, endofpath = -1;
    double min = 0.0;
    bool found = false;
    do {
      if (up == low) {
        last = low - 1;
        min = d[collist[up++]];
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double h = d[j];
          if (h <= min) {
            if (h < min) {
              up = low;
              min = h;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
        for (int k = low; k < up; ++k) {
          const int j = collist[k];
          if (y[j] < 0) {
            endofpath = j;
            found = true;
            break;
          }
        }
      }
      if (!found) {
        const int j1 = collist[low++];
        const int i = y[j1];
        const double u1 = cost(i, j1) - v[j1] - min;
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double h = cost(i, j) - v[j] - u1;
          if (h < d[j]) {
            d[j] = h;
            pred[j] = i;
            if (h == min) {
              if (y[j] < 0) {
                endofpath = j;
                found = true;
                break;
              }
              collist[k] = collist[up];
              collist[up++] = j;
            }
          }
        }
      }
    } while (!found);

    for (int k = 0; k <= last; ++k) {
      const int j = collist[k];
      v[j] += d[j] - min;
    }
    int i;
    do {
      i = pred[endofpath];
      y[endofpath] = i;
      const int next = x[i];
      x[i] = endofpath;
      endofpath = next;
    } while (i != f);
  }

  AssignmentResult result;
  result.row_to_col = x;
  for (int i = 0; i < n; ++i) result.cost += cost(i, x[i]);
  return result;
}

}  // namespace sdstein
