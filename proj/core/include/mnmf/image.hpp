#pragma once

#include <cstddef>
#include <filesystem>
#include <utility>
#include <vector>

#include "mnmf/linalg.hpp"
#include "mnmf/omf.hpp"
#include "mnmf/rng.hpp"

namespace mnmf {

/// Grayscale image with pixel values in [0, 1]; rows x cols.
struct ImageGrid {
  Matrix pixels;

  int rows() const { return static_cast<int>(pixels.rows()); }
  int cols() const { return static_cast<int>(pixels.cols()); }
};

/// Binary PGM (P5, maxval <= 255). Pixel p maps to p / maxval.
ImageGrid read_pgm(const std::filesystem::path& path);
/// Writes round(255 * clamp(p, 0, 1)).
void write_pgm(const std::filesystem::path& path, const ImageGrid& image);

enum class PatchSampling { iid, walk };

/// Top-left corner of a k x k window moving by a simple symmetric random walk
/// on the torus of grid positions.
struct PatchWalker {
  int row = 0;
  int col = 0;
  int k = 1;
  int grid_rows = 1;
  int grid_cols = 1;

  /// One step in a uniformly random cardinal direction, wrapped.
  void step(Rng& rng);
};

/// k² x count matrix of k x k patches flattened row-major, with periodic
/// wrap. In walk mode the walker steps once before each extraction. When
/// `positions` is non-null the corners used are appended to it.
Matrix image_patch_minibatch(const ImageGrid& image, int k, int count, PatchSampling mode,
                             PatchWalker& walker, Rng& rng,
                             std::vector<std::pair<int, int>>* positions = nullptr);

/// Codes every k x k patch on the stride grid (always covering the last row
/// and column) against W and averages the approximations at overlapping
/// pixels. The result is clipped to [0, 1].
ImageGrid reconstruct_grid(const ImageGrid& image, const Matrix& W, int k, int stride,
                           const CodingOptions& coding);

/// Tiles the atoms (columns of W, each a k x k patch) into a near-square
/// grid with one-pixel separators. Each tile is min-max scaled to [0, 1].
ImageGrid atom_grid(const Matrix& W, int k);

}  // namespace mnmf
