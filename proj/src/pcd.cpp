// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#include "crackdet/pcd.hpp"

#include <cmath>
#include <string>

namespace crackdet {

void PcdConfig::validate() const {
  if (!(tad_threshold >= 0.0 && tad_threshold < 1.0)) {
    throw ParameterError("tad_threshold must be in [0,1)");
  }
  if (!(c1 > 0.0)) throw ParameterError("c1 must be positive");
  if (!(t1 > 0.0)) throw ParameterError("t1 must be positive");
  if (window_size < 1 || window_size % 2 == 0) {
    throw ParameterError("window_size must be odd and positive");
  }
  if (!(window_sigma > 0.0)) throw ParameterError("window_sigma must be positive");
}

CrackMap::CrackMap(RealField field) : RealField(std::move(field)) {
  for (double v : data()) {
    if (!(v == 0.0 || (v > 0.5 && v <= 1.0))) {
      throw ParameterError("crack likelihood outside {0} U (0.5,1]: " + std::to_string(v));
    }
  }
}

RealField truncated_abs_diff(const GrayFrame& ref, const GrayFrame& dist, double threshold) {
  if (!ref.same_size(dist)) throw DimensionError("frame sizes differ");
  if (!(threshold >= 0.0 && threshold < 1.0)) {
    throw ParameterError("TAD threshold must be in [0,1)");
  }
  RealField out(ref.width(), ref.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = std::fabs(ref.data()[i] - dist.data()[i]);
    out.data()[i] = (d >= threshold) ? d : 0.0;
  }
  return out;
}

RealField contrast_modulate(const RealField& tad, const RealField& sigma, double c1) {
  if (!tad.same_size(sigma)) throw DimensionError("map sizes differ");
  if (!(c1 > 0.0)) throw ParameterError("c1 must be positive");
  RealField out(tad.width(), tad.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = tad.data()[i] / (sigma.data()[i] + c1);
  }
  return out;
}

RealField laplacian_modulate(const RealField& modulated, const RealField& lap) {
  if (!modulated.same_size(lap)) throw DimensionError("map sizes differ");
  RealField out(modulated.width(), modulated.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = modulated.data()[i] * std::fabs(lap.data()[i]);
  }
  return out;
}

CrackMap truncated_sigmoid(const RealField& field, double t1) {
  if (!(t1 > 0.0)) throw ParameterError("t1 must be positive");
  RealField out(field.width(), field.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = field.data()[i];
    out.data()[i] = (v > t1) ? 1.0 / (1.0 + std::exp(-(v - t1) / t1)) : 0.0;
  }
  return CrackMap(std::move(out));
}

CrackMap compute_crack_map(const GrayFrame& ref, const GrayFrame& dist, const PcdConfig& cfg) {
  cfg.validate();
  if (!ref.same_size(dist)) throw DimensionError("frame sizes differ");
  RealField stage = truncated_abs_diff(ref, dist, cfg.tad_threshold);
  if (cfg.contrast_modulation) {
    const Kernel window = gaussian_kernel(cfg.window_size, cfg.window_sigma);
    stage = contrast_modulate(stage, local_std(ref, window), cfg.c1);
  }
  if (cfg.laplacian_modulation) {
    stage = laplacian_modulate(stage, laplacian(dist));
  }
  return truncated_sigmoid(stage, cfg.t1);
}

double crack_artifact_score(const CrackMap& map) {
  if (map.empty()) throw ParameterError("empty crack map");
  double sum = 0.0;
  for (double v : map.data()) sum += v;
  return sum / static_cast<double>(map.size());
}

}  // namespace crackdet
