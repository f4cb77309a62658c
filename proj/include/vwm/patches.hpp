#pragma once

#include <Eigen/Core>

#include "vwm/errors.hpp"
#include "vwm/image.hpp"

namespace vwm::predictor {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Tokens are flattened patch-side^2 x 3 pixel vectors in [0,1], one row per
// patch, patches ordered row-major over the grid.
template <typename T>
struct PatchGrid {
  int grid_side = 0;
  int patch_side = 0;
  Mat<T> tokens;

  int token_count() const { return grid_side * grid_side; }
};

template <typename T>
PatchGrid<T> patchify(const FloatImage& im, int patch_side) {
  if (im.width != im.height || patch_side <= 0 || im.width % patch_side != 0)
    throw ConfigError("image side must be square and divisible by the patch side");
  PatchGrid<T> grid;
  grid.patch_side = patch_side;
  grid.grid_side = im.width / patch_side;
  const int n = grid.token_count();
  const int pd = patch_side * patch_side * 3;
  grid.tokens.resize(n, pd);
  for (int gy = 0; gy < grid.grid_side; ++gy) {
    for (int gx = 0; gx < grid.grid_side; ++gx) {
      T* row = grid.tokens.row(gy * grid.grid_side + gx).data();
      int k = 0;
      for (int dy = 0; dy < patch_side; ++dy)
        for (int dx = 0; dx < patch_side; ++dx)
          for (int c = 0; c < 3; ++c)
            row[k++] = static_cast<T>(im.at(gx * patch_side + dx, gy * patch_side + dy, c));
    }
  }
  return grid;
}

template <typename T>
FloatImage unpatchify(const PatchGrid<T>& grid) {
  const int side = grid.grid_side * grid.patch_side;
  FloatImage im(side, side);
  for (int gy = 0; gy < grid.grid_side; ++gy) {
    for (int gx = 0; gx < grid.grid_side; ++gx) {
      const T* row = grid.tokens.row(gy * grid.grid_side + gx).data();
      int k = 0;
      for (int dy = 0; dy < grid.patch_side; ++dy)
        for (int dx = 0; dx < grid.patch_side; ++dx)
          for (int c = 0; c < 3; ++c)
            im.at(gx * grid.patch_side + dx, gy * grid.patch_side + dy, c) =
                static_cast<float>(row[k++]);
    }
  }
  return im;
}

// Index of the grid cell containing pixel (x, y).
inline int patch_of_pixel(int x, int y, int patch_side, int grid_side) {
  return (y / patch_side) * grid_side + (x / patch_side);
}

}  // namespace vwm::predictor
