// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#include "crackdet/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crackdet {

RealField::RealField(int width, int height, double fill) {
  if (width < 1 || height < 1) {
    throw ParameterError("field dimensions must be positive, got " + std::to_string(width) +
                         "x" + std::to_string(height));
  }
  width_ = width;
  height_ = height;
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

double RealField::at_clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y);
}

GrayFrame::GrayFrame(int width, int height, double fill) : RealField(width, height, fill) {
  if (fill < 0.0 || fill > 1.0) {
    throw ParameterError("gray intensity outside [0,1]: " + std::to_string(fill));
  }
}

GrayFrame::GrayFrame(RealField field) : RealField(std::move(field)) {
  for (double v : data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ParameterError("gray intensity outside [0,1]: " + std::to_string(v));
    }
  }
}

GrayFrame to_grayscale(const RealField& r, const RealField& g, const RealField& b) {
  if (!r.same_size(g) || !r.same_size(b)) {
    throw DimensionError("channel planes differ in size");
  }
  RealField out(r.width(), r.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double y = 0.299 * r.data()[i] + 0.587 * g.data()[i] + 0.114 * b.data()[i];
    // Weights sum to 1 but guard against rounding just above 1.
    out.data()[i] = std::clamp(y, 0.0, 1.0);
  }
  return GrayFrame(std::move(out));
}

Kernel gaussian_kernel(int size, double sigma) {
  if (size < 1 || size % 2 == 0) {
    throw ParameterError("kernel size must be odd and positive, got " + std::to_string(size));
  }
  if (!(sigma > 0.0)) {
    throw ParameterError("sigma must be positive");
  }
  Kernel k;
  k.size = size;
  const int c = (size - 1) / 2;
  std::vector<double> taps(size);
  double sum1d = 0.0;
  for (int i = 0; i < size; ++i) {
    taps[i] = std::exp(-static_cast<double>((i - c) * (i - c)) / (2.0 * sigma * sigma));
    sum1d += taps[i];
  }
  for (double& t : taps) t /= sum1d;
  k.separable = taps;
  k.coeffs.resize(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      k.coeffs[static_cast<std::size_t>(y) * size + x] = taps[y] * taps[x];
    }
  }
  return k;
}

namespace {

void check_kernel_fits(const RealField& frame, const Kernel& kernel) {
  if (frame.empty()) throw ParameterError("empty frame");
  const int limit = 2 * std::min(frame.width(), frame.height()) + 1;
  if (kernel.size > limit) {
    throw ParameterError("kernel size " + std::to_string(kernel.size) +
                         " too large for frame " + std::to_string(frame.width()) + "x" +
                         std::to_string(frame.height()));
  }
}

RealField convolve_separable(const RealField& frame, const std::vector<double>& taps) {
  const int size = static_cast<int>(taps.size());
  const int r = (size - 1) / 2;
  RealField tmp(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * frame.at_clamped(x + k, y);
      tmp.at(x, y) = acc;
    }
  }
  RealField out(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * tmp.at_clamped(x, y + k);
      out.at(x, y) = acc;
    }
  }
  return out;
}

}  // namespace

RealField convolve_same(const RealField& frame, const Kernel& kernel) {
  check_kernel_fits(frame, kernel);
  if (!kernel.separable.empty()) {
    return convolve_separable(frame, kernel.separable);
  }
  const int r = (kernel.size - 1) / 2;
  RealField out(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      double acc = 0.0;
      for (int ky = -r; ky <= r; ++ky) {
        for (int kx = -r; kx <= r; ++kx) {
          acc += kernel.at(kx + r, ky + r) * frame.at_clamped(x + kx, y + ky);
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

RealField local_mean(const RealField& frame, const Kernel& gkernel) {
  return convolve_same(frame, gkernel);
}

RealField local_std(const RealField& frame, const Kernel& gkernel) {
  RealField mean = convolve_same(frame, gkernel);
  RealField squared(frame.width(), frame.height());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    squared.data()[i] = frame.data()[i] * frame.data()[i];
  }
  RealField mean_sq = convolve_same(squared, gkernel);
  RealField out(frame.width(), frame.height());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    // Negative residue from rounding is clamped before the sqrt.
    const double var = mean_sq.data()[i] - mean.data()[i] * mean.data()[i];
    out.data()[i] = std::sqrt(std::max(0.0, var));
  }
  return out;
}

RealField laplacian(const RealField& frame) {
  if (frame.empty()) throw ParameterError("empty frame");
  RealField out(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      out.at(x, y) = frame.at_clamped(x - 1, y) + frame.at_clamped(x + 1, y) +
                     frame.at_clamped(x, y - 1) + frame.at_clamped(x, y + 1) -
                     4.0 * frame.at(x, y);
    }
  }
  return out;
}

}  // namespace crackdet
