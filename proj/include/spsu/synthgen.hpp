#pragma once

// Synthetic benchmark scenes: a Potts-Markov region map, one procedural
// texture per region, and abundances that interpolate between two extreme
// per-region profiles with the texture intensity as the mixing weight.
// The cube is the exact noiseless product of the endmember library with
// those abundances.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spsu/error.hpp"
#include "spsu/features.hpp"
#include "spsu/matrix.hpp"
#include "spsu/rng.hpp"

namespace spsu {

/// Gibbs sampler for a J-class Potts-Markov field on the 4-neighbor
/// lattice with interaction strength beta. Sites update in checkerboard
/// order (even parity first, row-major within a parity) so runs are
/// reproducible. beta = 0 yields i.i.d. uniform labels.
inline std::vector<int> sample_potts(int height, int width, int num_classes,
                                     double beta, int sweeps,
                                     std::uint64_t seed) {
  if (height < 1 || width < 1)
    throw ConfigError("sample_potts: empty lattice");
  if (num_classes < 1) throw ConfigError("sample_potts: J must be >= 1");
  if (beta < 0.0) throw ConfigError("sample_potts: beta must be >= 0");
  if (sweeps < 1) throw ConfigError("sample_potts: sweeps must be >= 1");

  const std::size_t n = static_cast<std::size_t>(height) * width;
  std::vector<int> labels(n, 0);
  if (num_classes == 1) return labels;

  std::mt19937_64 rng(seed);
  for (auto& l : labels)
    l = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(num_classes)));

  std::vector<double> weight(static_cast<std::size_t>(num_classes));
  auto site = [&](int r, int c) -> std::size_t {
    return static_cast<std::size_t>(r) * width + c;
  };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int parity = 0; parity < 2; ++parity) {
      for (int r = 0; r < height; ++r) {
        for (int c = (r + parity) % 2; c < width; c += 2) {
          std::fill(weight.begin(), weight.end(), 0.0);
          if (r > 0) weight[static_cast<std::size_t>(labels[site(r - 1, c)])] += 1.0;
          if (r + 1 < height) weight[static_cast<std::size_t>(labels[site(r + 1, c)])] += 1.0;
          if (c > 0) weight[static_cast<std::size_t>(labels[site(r, c - 1)])] += 1.0;
          if (c + 1 < width) weight[static_cast<std::size_t>(labels[site(r, c + 1)])] += 1.0;
          double total = 0.0;
          for (auto& wj : weight) {
            wj = std::exp(beta * wj);
            total += wj;
          }
          double u = uniform01(rng) * total;
          int pick = num_classes - 1;
          for (int j = 0; j < num_classes; ++j) {
            u -= weight[static_cast<std::size_t>(j)];
            if (u <= 0.0) { pick = j; break; }
          }
          labels[site(r, c)] = pick;
        }
      }
    }
  }
  return labels;
}

enum class TextureKind { smoothed_noise, stripes, checker_blur };

inline TextureKind texture_kind_from_string(const std::string& name) {
  if (name == "smoothed-noise") return TextureKind::smoothed_noise;
  if (name == "stripes") return TextureKind::stripes;
  if (name == "checker-blur") return TextureKind::checker_blur;
  throw ConfigError("unknown texture kind '" + name + "'");
}

struct TextureParams {
  double blur_sigma = 5.0;  // smoothed-noise
  int stripe_period = 8;    // stripes
  int checker_cell = 8;     // checker-blur
  double lo = 0.05;         // intensity bounds; textures never reach 0 or 1
  double hi = 0.95;
};

namespace detail {

inline void gaussian_blur_inplace(Matrix& img, double sigma) {
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  Vector kernel(2 * half + 1);
  for (int i = -half; i <= half; ++i)
    kernel[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
  kernel /= kernel.sum();

  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  Matrix tmp(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i)
        acc += kernel[i + half] * img(reflect_index(r + i, h), c);
      tmp(r, c) = acc;
    }
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i)
        acc += kernel[i + half] * tmp(r, reflect_index(c + i, w));
      img(r, c) = acc;
    }
}

inline void rescale_to(Matrix& img, double lo, double hi) {
  const double mn = img.minCoeff();
  const double mx = img.maxCoeff();
  if (mx > mn) {
    img = ((img.array() - mn) / (mx - mn) * (hi - lo) + lo).matrix();
  } else {
    img.setConstant(0.5 * (lo + hi));
  }
}

}  // namespace detail

/// Procedural region texture with values in [lo, hi] (strictly inside
/// (0, 1) by default, so no scene pixel is ever pure).
inline Matrix make_texture(int height, int width, TextureKind kind,
                           std::uint64_t seed,
                           const TextureParams& params = {}) {
  if (height < 1 || width < 1) throw ConfigError("make_texture: empty image");
  std::mt19937_64 rng(seed);
  Matrix img(height, width);
  switch (kind) {
    case TextureKind::smoothed_noise: {
      for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) img(r, c) = uniform01(rng);
      detail::gaussian_blur_inplace(img, params.blur_sigma);
      detail::rescale_to(img, params.lo, params.hi);
      break;
    }
    case TextureKind::stripes: {
      const double phase = uniform01(rng) * 2.0 * std::numbers::pi;
      const double mid = 0.5 * (params.lo + params.hi);
      const double amp = 0.5 * (params.hi - params.lo);
      for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
          img(r, c) = mid + amp * std::sin(2.0 * std::numbers::pi * c /
                                               params.stripe_period +
                                           phase);
      break;
    }
    case TextureKind::checker_blur: {
      for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
          img(r, c) =
              ((r / params.checker_cell + c / params.checker_cell) % 2 == 0)
                  ? 0.0
                  : 1.0;
      detail::gaussian_blur_inplace(img, 2.0);
      detail::rescale_to(img, params.lo, params.hi);
      break;
    }
  }
  img = img.cwiseMax(params.lo).cwiseMin(params.hi);
  return img;
}

struct RegionModel {
  Vector psi1;     // extreme abundance profile at texture intensity 1
  Vector psi2;     // extreme abundance profile at texture intensity 0
  Matrix texture;  // tiled (or cropped) over the scene
};

struct SyntheticSceneSpec {
  int height = 0;
  int width = 0;
  double potts_beta = 1.0;
  int potts_sweeps = 200;
  Matrix endmembers;                 // d1 x R1 library spectra
  std::vector<RegionModel> regions;  // one per Potts class
  std::uint64_t seed = 0;
};

struct SyntheticScene {
  std::vector<int> labels;  // region index per pixel
  Matrix abundances;        // R1 x P ground truth
  ImageCube cube;
  PanchromaticImage pan;
};

/// Smooth synthetic reflectance spectra (mixtures of Gaussian bumps over
/// a 400-2500 nm grid), a stand-in endmember library for benchmarks.
inline Matrix make_endmember_library(int bands, int count,
                                     std::uint64_t seed) {
  if (bands < 1 || count < 1)
    throw ConfigError("make_endmember_library: bands and count must be >= 1");
  std::mt19937_64 rng(seed);
  Matrix lib(bands, count);
  for (int r = 0; r < count; ++r) {
    const double baseline = 0.05 + 0.10 * uniform01(rng);
    lib.col(r).setConstant(baseline);
    const int bumps = 3 + static_cast<int>(uniform_index(rng, 4));
    for (int b = 0; b < bumps; ++b) {
      const double center = uniform01(rng) * (bands - 1);
      const double width = bands * (0.02 + 0.10 * uniform01(rng));
      const double amp = 0.10 + 0.40 * uniform01(rng);
      for (int i = 0; i < bands; ++i)
        lib(i, r) += amp * std::exp(-0.5 * std::pow((i - center) / width, 2));
    }
  }
  return lib.cwiseMin(1.0).cwiseMax(0.01);
}

inline SyntheticScene synthesize_scene(const SyntheticSceneSpec& spec) {
  if (spec.height < 1 || spec.width < 1)
    throw ConfigError("synthesize_scene: empty scene");
  if (spec.regions.empty())
    throw ConfigError("synthesize_scene: no regions defined");
  const Index r1 = spec.endmembers.cols();
  if (r1 < 1) throw ConfigError("synthesize_scene: empty endmember library");

  // Validate the extreme profiles and normalize them exactly so every
  // generated abundance column sums to 1 to machine precision.
  std::vector<RegionModel> regions = spec.regions;
  for (std::size_t j = 0; j < regions.size(); ++j) {
    for (Vector* psi : {&regions[j].psi1, &regions[j].psi2}) {
      if (psi->size() != r1)
        throw DimensionError("synthesize_scene: psi of region " +
                             std::to_string(j) + " has length " +
                             std::to_string(psi->size()) + ", expected " +
                             std::to_string(r1));
      const double sum = psi->sum();
      if (psi->minCoeff() < -1e-12 || std::abs(sum - 1.0) > 1e-9)
        throw DataError("synthesize_scene: psi of region " +
                        std::to_string(j) + " is not on the simplex");
      *psi /= sum;
    }
    if (regions[j].texture.size() == 0)
      throw DataError("synthesize_scene: region " + std::to_string(j) +
                      " has no texture");
  }

  SyntheticScene scene;
  const int num_regions = static_cast<int>(regions.size());
  scene.labels = sample_potts(spec.height, spec.width, num_regions,
                              spec.potts_beta, spec.potts_sweeps, spec.seed);

  const Index p = static_cast<Index>(spec.height) * spec.width;
  scene.abundances.resize(r1, p);
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const Index px = static_cast<Index>(r) * spec.width + c;
      const RegionModel& region =
          regions[static_cast<std::size_t>(scene.labels[static_cast<std::size_t>(px)])];
      const double t = region.texture(r % region.texture.rows(),
                                      c % region.texture.cols());
      scene.abundances.col(px) = t * region.psi1 + (1.0 - t) * region.psi2;
    }
  }

  scene.cube.height = spec.height;
  scene.cube.width = spec.width;
  scene.cube.bands = spec.endmembers * scene.abundances;
  scene.pan = synthesize_panchromatic(scene.cube);
  return scene;
}

}  // namespace spsu
