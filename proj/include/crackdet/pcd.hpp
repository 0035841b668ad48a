// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#ifndef CRACKDET_PCD_HPP
#define CRACKDET_PCD_HPP

#include "crackdet/image.hpp"

namespace crackdet {

// Pipeline constants and ablation switches for crack detection.
//
// t1 is the sigmoid truncation knee. It has no published value; the default
// was calibrated on synthetic crack fixtures (see the acceptance suite) so
// that a full-contrast crack edge in a smooth region fires while modest
// differences in textured regions do not.
struct PcdConfig {
  double tad_threshold = 0.1;
  double c1 = 0.01;
  double t1 = 2.0;
  bool contrast_modulation = true;
  bool laplacian_modulation = true;
  int window_size = 5;
  double window_sigma = 1.5;

  void validate() const;
};

// Per-pixel crack likelihood; every value is exactly 0 or in (0.5, 1].
class CrackMap : public RealField {
 public:
  CrackMap() = default;
  explicit CrackMap(RealField field);
};

// |x - y| with values strictly below threshold zeroed.
RealField truncated_abs_diff(const GrayFrame& ref, const GrayFrame& dist, double threshold);

// Divide the difference map by local contrast plus a stabilizer.
RealField contrast_modulate(const RealField& tad, const RealField& sigma, double c1);

// Multiply by the absolute Laplacian response.
RealField laplacian_modulate(const RealField& modulated, const RealField& lap);

// sigmoid((v - t1) / t1) where v > t1, else 0.
CrackMap truncated_sigmoid(const RealField& field, double t1);

// Full staged pipeline: TAD, contrast modulation on the reference frame's
// local contrast, Laplacian modulation on the distorted frame, sigmoid.
CrackMap compute_crack_map(const GrayFrame& ref, const GrayFrame& dist, const PcdConfig& cfg);

// Mean of the crack map; larger means lower quality.
double crack_artifact_score(const CrackMap& map);

}  // namespace crackdet

#endif  // CRACKDET_PCD_HPP
