// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#include "crackdet/qa.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

namespace crackdet {

namespace {

constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

// GMSD constant 170 on an 8-bit range, rescaled to [0,1] data.
constexpr double kGmsC = 170.0 / (255.0 * 255.0);

RealField prewitt_magnitude(const GrayFrame& frame) {
  RealField out(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      double gx = 0.0;
      double gy = 0.0;
      for (int k = -1; k <= 1; ++k) {
        gx += frame.at_clamped(x - 1, y + k) - frame.at_clamped(x + 1, y + k);
        gy += frame.at_clamped(x + k, y - 1) - frame.at_clamped(x + k, y + 1);
      }
      gx /= 3.0;
      gy /= 3.0;
      out.at(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

}  // namespace

std::size_t BinaryMap::crack_count() const {
  return static_cast<std::size_t>(std::accumulate(data.begin(), data.end(), std::size_t{0}));
}

QualityMap ssim_map(const GrayFrame& ref, const GrayFrame& dist) {
  if (!ref.same_size(dist)) throw DimensionError("frame sizes differ");
  if (ref.width() < kSsimWindow || ref.height() < kSsimWindow) {
    throw ParameterError("frames smaller than the 11x11 SSIM window");
  }
  const Kernel window = gaussian_kernel(kSsimWindow, kSsimSigma);
  const RealField mu_x = local_mean(ref, window);
  const RealField mu_y = local_mean(dist, window);

  RealField xx(ref.width(), ref.height());
  RealField yy(ref.width(), ref.height());
  RealField xy(ref.width(), ref.height());
  for (std::size_t i = 0; i < xx.size(); ++i) {
    xx.data()[i] = ref.data()[i] * ref.data()[i];
    yy.data()[i] = dist.data()[i] * dist.data()[i];
    xy.data()[i] = ref.data()[i] * dist.data()[i];
  }
  const RealField e_xx = local_mean(xx, window);
  const RealField e_yy = local_mean(yy, window);
  const RealField e_xy = local_mean(xy, window);

  const double c1 = kSsimK1 * kSsimK1;  // (K1*L)^2 with L=1
  const double c2 = kSsimK2 * kSsimK2;
  QualityMap out{RealField(ref.width(), ref.height()), Polarity::kHigherIsBetter};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double mx = mu_x.data()[i];
    const double my = mu_y.data()[i];
    const double var_x = e_xx.data()[i] - mx * mx;
    const double var_y = e_yy.data()[i] - my * my;
    const double cov = e_xy.data()[i] - mx * my;
    out.values.data()[i] = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                           ((mx * mx + my * my + c1) * (var_x + var_y + c2));
  }
  return out;
}

double ssim_index(const GrayFrame& ref, const GrayFrame& dist) {
  const QualityMap map = ssim_map(ref, dist);
  double sum = 0.0;
  for (double v : map.values.data()) sum += v;
  return sum / static_cast<double>(map.values.size());
}

QualityMap squared_error_map(const GrayFrame& ref, const GrayFrame& dist) {
  if (!ref.same_size(dist)) throw DimensionError("frame sizes differ");
  QualityMap out{RealField(ref.width(), ref.height()), Polarity::kHigherIsWorse};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double d = ref.data()[i] - dist.data()[i];
    out.values.data()[i] = d * d;
  }
  return out;
}

double psnr_from_pooled_mse(double mse) {
  if (mse < 0.0) throw ParameterError("mse must be nonnegative");
  if (mse == 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

QualityMap gms_map(const GrayFrame& ref, const GrayFrame& dist) {
  if (!ref.same_size(dist)) throw DimensionError("frame sizes differ");
  if (ref.width() < 3 || ref.height() < 3) {
    throw ParameterError("frames smaller than the 3x3 gradient support");
  }
  const RealField g_ref = prewitt_magnitude(ref);
  const RealField g_dist = prewitt_magnitude(dist);
  QualityMap out{RealField(ref.width(), ref.height()), Polarity::kHigherIsBetter};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double a = g_ref.data()[i];
    const double b = g_dist.data()[i];
    out.values.data()[i] = (2.0 * a * b + kGmsC) / (a * a + b * b + kGmsC);
  }
  return out;
}

double gmsd_score(const GrayFrame& ref, const GrayFrame& dist) {
  const QualityMap map = gms_map(ref, dist);
  double mean = 0.0;
  for (double v : map.values.data()) mean += v;
  mean /= static_cast<double>(map.values.size());
  double var = 0.0;
  for (double v : map.values.data()) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(map.values.size()));
}

BinaryMap binarize_map(const QualityMap& map, double threshold) {
  BinaryMap out;
  out.width = map.width();
  out.height = map.height();
  out.data.resize(map.values.size());
  const bool flag_above = map.polarity == Polarity::kHigherIsWorse;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double v = map.values.data()[i];
    out.data[i] = (flag_above ? v > threshold : v < threshold) ? 1 : 0;
  }
  return out;
}

namespace {

void put_u32le(std::ofstream& os, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  os.write(bytes, 4);
}

std::uint32_t get_u32le(std::ifstream& is) {
  unsigned char bytes[4];
  is.read(reinterpret_cast<char*>(bytes), 4);
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void write_qmap(const std::filesystem::path& path, const QualityMap& map) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write("QMAP", 4);
  put_u32le(os, static_cast<std::uint32_t>(map.width()));
  put_u32le(os, static_cast<std::uint32_t>(map.height()));
  const char tail[4] = {static_cast<char>(map.polarity), 0, 0, 0};
  os.write(tail, 4);
  for (double v : map.values.data()) {
    const float f = static_cast<float>(v);
    char buf[4];
    std::memcpy(buf, &f, 4);
    os.write(buf, 4);
  }
  if (!os) throw IoError("write failed: " + path.string());
}

QualityMap read_qmap(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "QMAP", 4) != 0) {
    throw IoError("not a QMAP file: " + path.string());
  }
  const std::uint32_t w = get_u32le(is);
  const std::uint32_t h = get_u32le(is);
  char tail[4];
  is.read(tail, 4);
  if (!is || w == 0 || h == 0) throw IoError("corrupt QMAP header: " + path.string());
  if (tail[0] != 0 && tail[0] != 1) throw IoError("bad polarity byte: " + path.string());
  QualityMap map{RealField(static_cast<int>(w), static_cast<int>(h)),
                 static_cast<Polarity>(tail[0])};
  for (double& v : map.values.data()) {
    char buf[4];
    is.read(buf, 4);
    float f;
    std::memcpy(&f, buf, 4);
    v = static_cast<double>(f);
  }
  if (!is) throw IoError("truncated QMAP payload: " + path.string());
  return map;
}

}  // namespace crackdet
