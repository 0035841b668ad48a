// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#include "crackdet/integrate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

namespace crackdet {

WeightMap::WeightMap(RealField field) : RealField(std::move(field)) {
  for (double v : data()) {
    if (!(v >= 1.0) || !std::isfinite(v)) {
      throw ParameterError("pooling weight below 1 or non-finite");
    }
  }
}

double border_background_intensity(const GrayFrame& frame) {
  // Mode over 8-bit bins of the 1-pixel border.
  std::array<int, 256> hist{};
  auto tally = [&](double v) { ++hist[static_cast<int>(std::lround(v * 255.0))]; };
  for (int x = 0; x < frame.width(); ++x) {
    tally(frame.at(x, 0));
    tally(frame.at(x, frame.height() - 1));
  }
  for (int y = 1; y + 1 < frame.height(); ++y) {
    tally(frame.at(0, y));
    tally(frame.at(frame.width() - 1, y));
  }
  const auto it = std::max_element(hist.begin(), hist.end());
  return static_cast<double>(it - hist.begin()) / 255.0;
}

CropRect object_bounding_box(const GrayFrame& ref, const GrayFrame& dist, double bg, double tol) {
  if (!ref.same_size(dist)) throw DimensionError("frame sizes differ");
  if (tol < 0.0) throw ParameterError("tolerance must be nonnegative");
  int left = ref.width(), top = ref.height(), right = -1, bottom = -1;
  for (int y = 0; y < ref.height(); ++y) {
    for (int x = 0; x < ref.width(); ++x) {
      if (std::fabs(ref.at(x, y) - bg) > tol || std::fabs(dist.at(x, y) - bg) > tol) {
        left = std::min(left, x);
        top = std::min(top, y);
        right = std::max(right, x);
        bottom = std::max(bottom, y);
      }
    }
  }
  if (right < 0) throw EmptyObjectError("no pixel differs from the background");
  return CropRect{left, top, right + 1, bottom + 1};
}

RealField crop(const RealField& frame, const CropRect& rect) {
  if (rect.left < 0 || rect.top < 0 || rect.right > frame.width() ||
      rect.bottom > frame.height() || rect.width() < 1 || rect.height() < 1) {
    throw ParameterError("crop rectangle out of bounds");
  }
  RealField out(rect.width(), rect.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.at(x, y) = frame.at(rect.left + x, rect.top + y);
    }
  }
  return out;
}

GrayFrame crop(const GrayFrame& frame, const CropRect& rect) {
  return GrayFrame(crop(static_cast<const RealField&>(frame), rect));
}

WeightMap weight_map(const CrackMap& map, double c2) {
  if (!(c2 > 0.0)) throw ParameterError("c2 must be positive");
  RealField out(map.width(), map.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = map.data()[i];
    out.data()[i] = m == 0.0 ? 1.0 : (1.0 + c2) / (1.0 - m + c2);
  }
  return WeightMap(std::move(out));
}

double weighted_pool(const QualityMap& q, const WeightMap& w) {
  if (!q.values.same_size(w)) throw DimensionError("map sizes differ");
  if (q.values.empty()) throw ParameterError("empty quality map");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    num += w.data()[i] * q.values.data()[i];
    den += w.data()[i];
  }
  return num / den;
}

Metric parse_metric(const std::string& name) {
  if (name == "ssim") return Metric::kSsim;
  if (name == "lumapsnr") return Metric::kLumaPsnr;
  if (name == "gms") return Metric::kGms;
  throw ParameterError("unknown metric '" + name + "' (ssim, lumapsnr, gms)");
}

std::string metric_name(Metric metric) {
  switch (metric) {
    case Metric::kSsim: return "ssim";
    case Metric::kLumaPsnr: return "lumapsnr";
    case Metric::kGms: return "gms";
  }
  throw ParameterError("bad metric enum");
}

namespace {

QualityMap metric_map(Metric metric, const GrayFrame& ref, const GrayFrame& dist) {
  switch (metric) {
    case Metric::kSsim: return ssim_map(ref, dist);
    case Metric::kLumaPsnr: return squared_error_map(ref, dist);
    case Metric::kGms: return gms_map(ref, dist);
  }
  throw ParameterError("bad metric enum");
}

double mean_of(const QualityMap& q) {
  double sum = 0.0;
  for (double v : q.values.data()) sum += v;
  return sum / static_cast<double>(q.values.size());
}

}  // namespace

FrameScores score_frame(const GrayFrame& ref, const GrayFrame& dist, Metric metric,
                        const PcdConfig& pcd, const IntegrationConfig& integ) {
  GrayFrame r = ref;
  GrayFrame d = dist;
  if (integ.crop_frames) {
    const double bg = integ.background ? *integ.background : border_background_intensity(ref);
    const CropRect rect = object_bounding_box(ref, dist, bg, integ.bg_tol);
    r = crop(ref, rect);
    d = crop(dist, rect);
  }
  const CrackMap cracks = compute_crack_map(r, d, pcd);
  const WeightMap weights = weight_map(cracks, integ.c2);
  const QualityMap q = metric_map(metric, r, d);

  FrameScores out;
  out.cas = crack_artifact_score(cracks);
  const double base_pooled = mean_of(q);
  const double enhanced_pooled = weighted_pool(q, weights);
  if (metric == Metric::kLumaPsnr) {
    out.base = psnr_from_pooled_mse(base_pooled);
    out.enhanced = psnr_from_pooled_mse(enhanced_pooled);
  } else {
    out.base = base_pooled;
    out.enhanced = enhanced_pooled;
  }
  return out;
}

double enhanced_frame_score(
    const GrayFrame& ref, const GrayFrame& dist,
    const std::function<QualityMap(const GrayFrame&, const GrayFrame&)>& model,
    const PcdConfig& pcd, const IntegrationConfig& integ) {
  GrayFrame r = ref;
  GrayFrame d = dist;
  if (integ.crop_frames) {
    const double bg = integ.background ? *integ.background : border_background_intensity(ref);
    const CropRect rect = object_bounding_box(ref, dist, bg, integ.bg_tol);
    r = crop(ref, rect);
    d = crop(dist, rect);
  }
  const WeightMap weights = weight_map(compute_crack_map(r, d, pcd), integ.c2);
  return weighted_pool(model(r, d), weights);
}

double sequence_score(std::size_t frame_count, int stride,
                      const std::function<double(std::size_t)>& scorer, int threads) {
  if (frame_count == 0) throw ParameterError("empty frame sequence");
  if (stride < 1) throw ParameterError("stride must be >= 1");
  std::vector<std::size_t> sampled;
  for (std::size_t i = 0; i < frame_count; i += static_cast<std::size_t>(stride)) {
    sampled.push_back(i);
  }
  std::vector<double> scores(sampled.size());
  if (threads <= 1 || sampled.size() < 2) {
    for (std::size_t k = 0; k < sampled.size(); ++k) scores[k] = scorer(sampled[k]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next.fetch_add(1); k < sampled.size(); k = next.fetch_add(1)) {
        scores[k] = scorer(sampled[k]);
      }
    };
    std::vector<std::thread> pool;
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(threads), sampled.size());
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  // Index-order reduction keeps the result independent of thread timing.
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  const fs::path descriptor = dir / "frames.txt";
  std::vector<fs::path> frames;
  if (fs::exists(descriptor)) {
    std::ifstream is(descriptor);
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      frames.push_back(dir / line);
    }
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = entry.path().extension().string();
      if (ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
        frames.push_back(entry.path());
      }
    }
    std::sort(frames.begin(), frames.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  }
  return frames;
}

}  // namespace crackdet
