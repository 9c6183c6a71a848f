#pragma once

// Panchromatic synthesis from a hyperspectral cube and per-pixel patch
// features. Pixels flatten row-major over (row, col): p = row * width + col.

#include <iostream>
#include <string>

#include "spsu/error.hpp"
#include "spsu/matrix.hpp"

namespace spsu {

struct ImageCube {
  int height = 0;
  int width = 0;
  Matrix bands;  // bands x (height*width), one row per spectral band
};

struct PanchromaticImage {
  int height = 0;
  int width = 0;
  Matrix values;  // height x width, stretched to [0, 255]
};

/// Symmetric (edge-inclusive) reflection of an index into [0, n); folds
/// as often as needed so any offset is valid.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  int j = i % period;
  if (j < 0) j += period;
  return j < n ? j : period - 1 - j;
}

/// Divides each band by its mean over the pixels, sums the normalized
/// bands and stretches the result to [0, 255]. A constant image has no
/// range to stretch and maps to all zeros.
inline PanchromaticImage synthesize_panchromatic(const ImageCube& cube) {
  const Index p = cube.bands.cols();
  if (cube.height < 1 || cube.width < 1 ||
      p != static_cast<Index>(cube.height) * cube.width)
    throw DimensionError("synthesize_panchromatic: cube is " +
                         std::to_string(cube.height) + "x" +
                         std::to_string(cube.width) + " but holds " +
                         std::to_string(p) + " pixels");
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(p);
  for (Index b = 0; b < cube.bands.rows(); ++b) {
    const double mean = cube.bands.row(b).mean();
    if (std::abs(mean) < 1e-300)
      throw DataError("synthesize_panchromatic: band " + std::to_string(b) +
                      " has zero mean");
    acc += cube.bands.row(b) / mean;
  }

  PanchromaticImage pan;
  pan.height = cube.height;
  pan.width = cube.width;
  pan.values.resize(cube.height, cube.width);
  const double lo = acc.minCoeff();
  const double hi = acc.maxCoeff();
  if (!(hi > lo)) {
    std::cerr << "synthesize_panchromatic: constant image, emitting zeros\n";
    pan.values.setZero();
    return pan;
  }
  for (int r = 0; r < cube.height; ++r)
    for (int c = 0; c < cube.width; ++c) {
      const double v = acc[static_cast<Index>(r) * cube.width + c];
      pan.values(r, c) = (v - lo) / (hi - lo) * 255.0;
    }
  return pan;
}

/// Per-pixel patch features: column p holds the w x w window centered on
/// pixel p, vectorized row-major within the window. Borders reflect
/// symmetrically, so every feature value occurs in the image itself.
inline Matrix extract_patches(const PanchromaticImage& pan, int w) {
  if (w < 1 || w % 2 == 0)
    throw ConfigError("extract_patches: window size must be odd and >= 1, got " +
                      std::to_string(w));
  if (pan.height < 1 || pan.width < 1)
    throw DimensionError("extract_patches: empty image");

  const int half = w / 2;
  const Index p = static_cast<Index>(pan.height) * pan.width;
  Matrix s(static_cast<Index>(w) * w, p);
  for (int r = 0; r < pan.height; ++r) {
    for (int c = 0; c < pan.width; ++c) {
      const Index col = static_cast<Index>(r) * pan.width + c;
      Index row = 0;
      for (int dr = -half; dr <= half; ++dr) {
        const int rr = reflect_index(r + dr, pan.height);
        for (int dc = -half; dc <= half; ++dc) {
          const int cc = reflect_index(c + dc, pan.width);
          s(row++, col) = pan.values(rr, cc);
        }
      }
    }
  }
  return s;
}

}  // namespace spsu
