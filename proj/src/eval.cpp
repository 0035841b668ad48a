// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#include "crackdet/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "crackdet/image_io.hpp"

namespace crackdet {

double LogisticParams::operator()(double x) const {
  return b1 + (b2 - b1) / (1.0 + std::exp(-(x - b3) / std::fabs(b4)));
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty manifest " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "stimulus_id,ref_dir,dist_dir,mos") {
    throw IoError("manifest header must be 'stimulus_id,ref_dir,dist_dir,mos'");
  }
  DatasetManifest manifest;
  std::vector<std::string> seen_ids;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 4) {
      throw IoError("manifest line " + std::to_string(line_no) +
                    ": expected 4 comma-separated fields (paths must not contain commas)");
    }
    StimulusRecord rec;
    rec.stimulus_id = fields[0];
    rec.ref_dir = fields[1];
    rec.dist_dir = fields[2];
    try {
      rec.mos = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw IoError("manifest line " + std::to_string(line_no) + ": bad MOS '" + fields[3] + "'");
    }
    if (!std::isfinite(rec.mos)) {
      throw IoError("manifest line " + std::to_string(line_no) + ": MOS must be finite");
    }
    if (std::find(seen_ids.begin(), seen_ids.end(), rec.stimulus_id) != seen_ids.end()) {
      throw IoError("duplicate stimulus_id '" + rec.stimulus_id + "'");
    }
    seen_ids.push_back(rec.stimulus_id);
    manifest.records.push_back(std::move(rec));
  }
  return manifest;
}

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// Average ranks, 1-based; ties get the mean of their rank range.
std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("vector lengths differ");
  if (a.size() < 3) throw ParameterError("need at least 3 samples");
  const double ma = mean(a);
  const double mb = mean(b);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (da == 0.0 || db == 0.0) throw NumericError("correlation undefined for a constant vector");
  return num / std::sqrt(da * db);
}

double srcc(const std::vector<double>& pred, const std::vector<double>& mos) {
  if (pred.size() != mos.size()) throw DimensionError("vector lengths differ");
  if (pred.size() < 3) throw ParameterError("need at least 3 samples");
  return pearson(average_ranks(pred), average_ranks(mos));
}

namespace {

double sse(const LogisticParams& p, const std::vector<double>& pred,
           const std::vector<double>& mos) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = p(pred[i]) - mos[i];
    acc += r * r;
  }
  return acc;
}

// Nelder-Mead over the 4 logistic parameters.
LogisticParams nelder_mead(const LogisticParams& init, const std::vector<double>& pred,
                           const std::vector<double>& mos) {
  using Point = std::array<double, 4>;
  auto eval = [&](const Point& x) {
    return sse(LogisticParams{x[0], x[1], x[2], x[3]}, pred, mos);
  };

  std::array<Point, 5> simplex;
  simplex[0] = {init.b1, init.b2, init.b3, init.b4};
  for (int i = 0; i < 4; ++i) {
    simplex[i + 1] = simplex[0];
    simplex[i + 1][i] += simplex[0][i] != 0.0 ? 0.05 * simplex[0][i] : 0.00025;
  }
  std::array<double, 5> f;
  for (int i = 0; i < 5; ++i) f[i] = eval(simplex[i]);

  constexpr int kMaxIter = 10000;
  constexpr double kRelTol = 1e-10;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    std::array<int, 5> idx = {0, 1, 2, 3, 4};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
    const int best = idx[0], worst = idx[4], second_worst = idx[3];
    if (f[worst] - f[best] < kRelTol * (std::fabs(f[best]) + 1e-30)) break;

    Point centroid{};
    for (int i : idx) {
      if (i == worst) continue;
      for (int d = 0; d < 4; ++d) centroid[d] += simplex[i][d] / 4.0;
    }
    auto blend = [&](double t) {
      Point p;
      for (int d = 0; d < 4; ++d) p[d] = centroid[d] + t * (centroid[d] - simplex[worst][d]);
      return p;
    };

    const Point reflected = blend(1.0);
    const double fr = eval(reflected);
    if (fr < f[best]) {
      const Point expanded = blend(2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        f[worst] = fe;
      } else {
        simplex[worst] = reflected;
        f[worst] = fr;
      }
    } else if (fr < f[second_worst]) {
      simplex[worst] = reflected;
      f[worst] = fr;
    } else {
      const Point contracted = blend(fr < f[worst] ? 0.5 : -0.5);
      const double fc = eval(contracted);
      if (fc < std::min(fr, f[worst])) {
        simplex[worst] = contracted;
        f[worst] = fc;
      } else {
        for (int i : idx) {
          if (i == best) continue;
          for (int d = 0; d < 4; ++d) {
            simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
          }
          f[i] = eval(simplex[i]);
        }
      }
    }
  }
  const auto best_it = std::min_element(f.begin(), f.end());
  const Point& x = simplex[best_it - f.begin()];
  return LogisticParams{x[0], x[1], x[2], x[3]};
}

}  // namespace

LogisticParams logistic_fit(const std::vector<double>& pred, const std::vector<double>& mos) {
  if (pred.size() != mos.size()) throw DimensionError("vector lengths differ");
  LogisticParams init;
  init.b1 = *std::max_element(mos.begin(), mos.end());
  init.b2 = *std::min_element(mos.begin(), mos.end());
  std::vector<double> sorted = pred;
  std::sort(sorted.begin(), sorted.end());
  init.b3 = sorted.size() % 2 == 1
                ? sorted[sorted.size() / 2]
                : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  init.b4 = stddev(pred);
  if (pred.size() < 4) {
    if (init.b4 == 0.0) init.b4 = 1.0;
    throw FitError("need at least 4 samples for a logistic fit", init);
  }
  if (init.b4 == 0.0) {
    init.b4 = 1.0;
    throw FitError("constant predictions cannot be fitted", init);
  }
  // One restart from the first optimum polishes plateaued simplices.
  LogisticParams fitted = nelder_mead(nelder_mead(init, pred, mos), pred, mos);
  if (sse(fitted, pred, mos) > sse(init, pred, mos)) {
    return init;  // never worse than the initialization
  }
  return fitted;
}

double plcc(const std::vector<double>& pred, const std::vector<double>& mos) {
  const LogisticParams fit = logistic_fit(pred, mos);
  std::vector<double> mapped(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) mapped[i] = fit(pred[i]);
  return pearson(mapped, mos);
}

namespace {

struct StimulusScores {
  bool ok = false;
  double mos = 0.0;
  std::vector<double> base;      // per metric
  std::vector<double> enhanced;  // per metric
};

StimulusScores score_stimulus(const StimulusRecord& rec, const EvalOptions& opts) {
  StimulusScores out;
  out.mos = rec.mos;
  const auto ref_frames = list_frames(rec.ref_dir);
  const auto dist_frames = list_frames(rec.dist_dir);
  if (ref_frames.empty() || ref_frames.size() != dist_frames.size()) {
    throw IoError("stimulus '" + rec.stimulus_id + "': ref/dist frame counts differ or empty");
  }
  std::vector<std::size_t> sampled;
  for (std::size_t i = 0; i < ref_frames.size(); i += static_cast<std::size_t>(opts.stride)) {
    sampled.push_back(i);
  }
  out.base.assign(opts.metrics.size(), 0.0);
  out.enhanced.assign(opts.metrics.size(), 0.0);
  for (std::size_t i : sampled) {
    const GrayFrame ref = load_gray(ref_frames[i]);
    const GrayFrame dist = load_gray(dist_frames[i]);
    for (std::size_t m = 0; m < opts.metrics.size(); ++m) {
      const FrameScores s = score_frame(ref, dist, opts.metrics[m], opts.pcd, opts.integ);
      out.base[m] += s.base;
      out.enhanced[m] += s.enhanced;
    }
  }
  for (std::size_t m = 0; m < opts.metrics.size(); ++m) {
    out.base[m] /= static_cast<double>(sampled.size());
    out.enhanced[m] /= static_cast<double>(sampled.size());
  }
  out.ok = true;
  return out;
}

}  // namespace

EvalReport evaluate(const DatasetManifest& manifest, const EvalOptions& opts) {
  if (opts.stride < 1) throw ParameterError("stride must be >= 1");
  std::vector<StimulusScores> all(manifest.records.size());
  std::vector<std::string> errors(manifest.records.size());

  auto run_one = [&](std::size_t i) {
    try {
      all[i] = score_stimulus(manifest.records[i], opts);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  if (opts.threads <= 1 || manifest.records.size() < 2) {
    for (std::size_t i = 0; i < manifest.records.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < manifest.records.size();
           i = next.fetch_add(1)) {
        run_one(i);
      }
    };
    std::vector<std::thread> pool;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(opts.threads),
                                         manifest.records.size());
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    if (!all[i].ok) {
      std::cerr << "skipping stimulus '" << manifest.records[i].stimulus_id
                << "': " << errors[i] << "\n";
      report.skipped.push_back(manifest.records[i].stimulus_id);
    }
  }

  std::vector<double> mos;
  for (const auto& s : all) {
    if (s.ok) mos.push_back(s.mos);
  }
  for (std::size_t m = 0; m < opts.metrics.size(); ++m) {
    for (const std::string variant : {"base", "enhanced"}) {
      EvalRow row;
      row.metric = metric_name(opts.metrics[m]);
      row.variant = variant;
      row.n = static_cast<int>(mos.size());
      std::vector<double> pred;
      for (const auto& s : all) {
        if (s.ok) pred.push_back(variant == std::string("base") ? s.base[m] : s.enhanced[m]);
      }
      try {
        row.srcc = srcc(pred, mos);
        row.fit = logistic_fit(pred, mos);
        std::vector<double> mapped(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) mapped[i] = row.fit(pred[i]);
        row.plcc = pearson(mapped, mos);
      } catch (const std::exception& e) {
        row.srcc = std::nan("");
        row.plcc = std::nan("");
        row.error = e.what();
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_report_json(const std::filesystem::path& path, const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json j;
    j["metric"] = row.metric;
    j["variant"] = row.variant;
    if (row.error.empty()) {
      j["srcc"] = row.srcc;
      j["plcc"] = row.plcc;
      j["fit"] = {{"b1", row.fit.b1}, {"b2", row.fit.b2}, {"b3", row.fit.b3}, {"b4", row.fit.b4}};
    } else {
      j["srcc"] = nullptr;
      j["plcc"] = nullptr;
      j["error"] = row.error;
    }
    j["n"] = row.n;
    doc["rows"].push_back(std::move(j));
  }
  doc["skipped"] = report.skipped;
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << doc.dump(2) << "\n";
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "metric,variant,srcc,plcc,n\n";
  for (const auto& row : report.rows) {
    os << row.metric << "," << row.variant << ",";
    if (row.error.empty()) {
      os << row.srcc << "," << row.plcc;
    } else {
      os << ",";
    }
    os << "," << row.n << "\n";
  }
}

}  // namespace crackdet
