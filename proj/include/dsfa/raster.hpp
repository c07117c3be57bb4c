#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "dsfa/types.hpp"

namespace dsfa {

// Multiband raster, band-sequential layout: all of band 0 (row-major), then
// band 1, and so on. Values are held as doubles; the on-disk payload is f32.
struct MultibandImage {
  int rows = 0;
  int cols = 0;
  int bands = 0;
  std::vector<double> values;

  Index pixel_count() const { return static_cast<Index>(rows) * cols; }
};

// Per-band mean and population standard deviation used by the z-score step.
// Bands with zero spread are flagged degenerate and standardize to zeros.
struct BandStats {
  Vector means;
  Vector stds;
  std::vector<bool> degenerate;
};

// On-disk format: <name>.json header {"rows","cols","bands","dtype":"f32",
// "layout":"bsq"} next to <name>.bin holding raw little-endian float32 in
// band-sequential order. `path` may name the base, the .json, or the .bin.
MultibandImage load_image(const std::filesystem::path& path);
void save_image(const MultibandImage& image, const std::filesystem::path& path);

// 8-bit binary PGM (P5), min-max scaled to [0,255] with round-half-up.
// Constant input maps to all zeros.
void save_gray_map(const Vector& values, int rows, int cols,
                   const std::filesystem::path& path);

// bands x pixels matrix; column j is the spectral vector of pixel j in
// row-major pixel order.
Matrix flatten(const MultibandImage& image);
MultibandImage unflatten(const Matrix& pixels, int rows, int cols);

// Per-band z-score with population (1/n) standard deviation. Requires at
// least two pixels. Zero-spread bands become all zeros and are flagged.
std::pair<Matrix, BandStats> zscore_standardize(const Matrix& X);

}  // namespace dsfa
