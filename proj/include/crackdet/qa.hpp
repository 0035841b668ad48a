// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#ifndef CRACKDET_QA_HPP
#define CRACKDET_QA_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "crackdet/image.hpp"

namespace crackdet {

enum class Polarity : std::uint8_t { kHigherIsBetter = 0, kHigherIsWorse = 1 };

// Per-pixel quality values from a base metric, with explicit polarity.
struct QualityMap {
  RealField values;
  Polarity polarity = Polarity::kHigherIsBetter;

  int width() const { return values.width(); }
  int height() const { return values.height(); }
};

// Crack / non-crack classification of a quality map.
struct BinaryMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 1 = crack

  std::size_t crack_count() const;
};

// Per-pixel SSIM, 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03, L=1.
QualityMap ssim_map(const GrayFrame& ref, const GrayFrame& dist);

// Unweighted mean of the SSIM map.
double ssim_index(const GrayFrame& ref, const GrayFrame& dist);

// Per-pixel squared luma error (HigherIsWorse).
QualityMap squared_error_map(const GrayFrame& ref, const GrayFrame& dist);

// 10*log10(1/mse) for unit dynamic range; mse=0 reports a capped 100 dB.
double psnr_from_pooled_mse(double mse);

// Gradient magnitude similarity with Prewitt gradients and the GMSD
// stability constant rescaled to unit dynamic range (170/255^2).
QualityMap gms_map(const GrayFrame& ref, const GrayFrame& dist);

// Standard deviation of the GMS map; higher is worse.
double gmsd_score(const GrayFrame& ref, const GrayFrame& dist);

// Hard-threshold a quality map into crack / non-crack pixels. HigherIsWorse
// maps flag values above the threshold, HigherIsBetter maps values below it.
BinaryMap binarize_map(const QualityMap& map, double threshold);

// 32-bit float raster with a 16-byte header: magic "QMAP", u32 width,
// u32 height, polarity byte, 3 zero pad bytes; little-endian throughout.
void write_qmap(const std::filesystem::path& path, const QualityMap& map);
QualityMap read_qmap(const std::filesystem::path& path);

}  // namespace crackdet

#endif  // CRACKDET_QA_HPP
