// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#ifndef CRACKDET_IMAGE_HPP
#define CRACKDET_IMAGE_HPP

#include <cstddef>
#include <vector>

#include "crackdet/errors.hpp"

namespace crackdet {

// Row-major 2D field of doubles. Values are unbounded but must stay finite.
class RealField {
 public:
  RealField() = default;
  RealField(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  // Clamped accessor used for replicated borders.
  double at_clamped(int x, int y) const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_size(const RealField& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// A RealField restricted to intensities in [0,1]. Validated on construction.
class GrayFrame : public RealField {
 public:
  GrayFrame() = default;
  GrayFrame(int width, int height, double fill = 0.0);
  explicit GrayFrame(RealField field);
};

// Square convolution kernel with odd size. Gaussian kernels carry their
// separable 1D factor so the filters can run as two passes.
struct Kernel {
  int size = 1;
  std::vector<double> coeffs;           // size*size, row-major
  std::vector<double> separable;        // 1D factor, empty when not separable

  double at(int x, int y) const { return coeffs[static_cast<std::size_t>(y) * size + x]; }
};

// Rec. 601 luma from three equally sized channel planes.
GrayFrame to_grayscale(const RealField& r, const RealField& g, const RealField& b);

// Normalized Gaussian tap grid; size odd, sigma > 0.
Kernel gaussian_kernel(int size, double sigma);

// Same-size sliding-window correlation (no kernel flip), replicated borders.
RealField convolve_same(const RealField& frame, const Kernel& kernel);

// Weighted local first/second moments; kernel must be a normalized weight mask.
RealField local_mean(const RealField& frame, const Kernel& gkernel);
RealField local_std(const RealField& frame, const Kernel& gkernel);

// Signed 4-neighbor Laplacian, replicated borders.
RealField laplacian(const RealField& frame);

}  // namespace crackdet

#endif  // CRACKDET_IMAGE_HPP
