// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#ifndef CRACKDET_INTEGRATE_HPP
#define CRACKDET_INTEGRATE_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crackdet/pcd.hpp"
#include "crackdet/qa.hpp"

namespace crackdet {

// Half-open pixel rectangle.
struct CropRect {
  int left = 0;
  int top = 0;
  int right = 0;
  int bottom = 0;

  int width() const { return right - left; }
  int height() const { return bottom - top; }
};

// Pooling weights derived from a crack map; every value >= 1.
class WeightMap : public RealField {
 public:
  WeightMap() = default;
  explicit WeightMap(RealField field);
};

// Modal border intensity, used as the automatic background estimate.
double border_background_intensity(const GrayFrame& frame);

// Tight rectangle around every pixel in either frame that differs from the
// background by more than tol. Throws EmptyObjectError when nothing does.
CropRect object_bounding_box(const GrayFrame& ref, const GrayFrame& dist, double bg, double tol);

RealField crop(const RealField& frame, const CropRect& rect);
GrayFrame crop(const GrayFrame& frame, const CropRect& rect);

// w = (1 + c2) / (1 - m + c2); equals 1 exactly where the crack map is 0.
WeightMap weight_map(const CrackMap& map, double c2);

// Weighted mean of the quality map in its native polarity.
double weighted_pool(const QualityMap& q, const WeightMap& w);

enum class Metric { kSsim, kLumaPsnr, kGms };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric metric);

struct IntegrationConfig {
  double c2 = 0.0001;
  std::optional<double> background;  // empty = auto from the border
  double bg_tol = 0.02;
  bool crop_frames = true;           // base scores also use the cropped frames
};

struct FrameScores {
  double base = 0.0;
  double enhanced = 0.0;
  double cas = 0.0;
};

// Crop, detect cracks, weight, pool. For lumaPSNR the squared-error map is
// pooled first and converted to dB afterwards.
FrameScores score_frame(const GrayFrame& ref, const GrayFrame& dist, Metric metric,
                        const PcdConfig& pcd, const IntegrationConfig& integ);

// Crack-weighted pooled value of an arbitrary quality-map producer, in the
// map's native domain.
double enhanced_frame_score(
    const GrayFrame& ref, const GrayFrame& dist,
    const std::function<QualityMap(const GrayFrame&, const GrayFrame&)>& model,
    const PcdConfig& pcd, const IntegrationConfig& integ);

// Mean of scorer(i) over i = 0, stride, 2*stride, ... below frame_count.
// With threads > 1 frames are scored concurrently but reduced in index
// order, so the result matches the sequential one bit for bit.
double sequence_score(std::size_t frame_count, int stride,
                      const std::function<double(std::size_t)>& scorer, int threads = 1);

// Frame files of a sequence directory in lexicographic order; a frames.txt
// descriptor (one filename per line) overrides the directory order.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

}  // namespace crackdet

#endif  // CRACKDET_INTEGRATE_HPP
