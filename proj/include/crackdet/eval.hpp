// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#ifndef CRACKDET_EVAL_HPP
#define CRACKDET_EVAL_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "crackdet/integrate.hpp"

namespace crackdet {

struct StimulusRecord {
  std::string stimulus_id;
  std::filesystem::path ref_dir;
  std::filesystem::path dist_dir;
  double mos = 0.0;
};

struct DatasetManifest {
  std::vector<StimulusRecord> records;
};

// Monotone 4-parameter logistic used to map predictions into MOS space:
// f(x) = b1 + (b2 - b1) / (1 + exp(-(x - b3) / |b4|)).
struct LogisticParams {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 1.0;

  double operator()(double x) const;
};

// Fit failure that still carries the initialization as a usable fallback.
class FitError : public NumericError {
 public:
  FitError(const std::string& msg, LogisticParams fallback)
      : NumericError(msg), fallback_(fallback) {}
  const LogisticParams& fallback() const { return fallback_; }

 private:
  LogisticParams fallback_;
};

// CSV manifest with header stimulus_id,ref_dir,dist_dir,mos. Paths
// containing commas are rejected (no quoting).
DatasetManifest load_manifest(const std::filesystem::path& path);

// Pearson correlation of two equally long vectors.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Spearman rank-order correlation with average ranks for ties.
double srcc(const std::vector<double>& pred, const std::vector<double>& mos);

// Least-squares logistic fit by Nelder-Mead simplex descent from a
// data-driven initialization; never returns a worse objective than the
// initialization.
LogisticParams logistic_fit(const std::vector<double>& pred, const std::vector<double>& mos);

// Pearson correlation after the logistic mapping.
double plcc(const std::vector<double>& pred, const std::vector<double>& mos);

struct EvalRow {
  std::string metric;
  std::string variant;  // "base" or "enhanced"
  double srcc = 0.0;
  double plcc = 0.0;
  LogisticParams fit;
  int n = 0;
  std::string error;  // nonempty when the correlation is undefined
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<std::string> skipped;  // stimulus ids that failed to load
};

struct EvalOptions {
  std::vector<Metric> metrics = {Metric::kSsim, Metric::kLumaPsnr, Metric::kGms};
  int stride = 10;
  int threads = 1;
  PcdConfig pcd;
  IntegrationConfig integ;
};

// Base and enhanced sequence scores per stimulus, correlated against MOS.
EvalReport evaluate(const DatasetManifest& manifest, const EvalOptions& opts);

void write_report_json(const std::filesystem::path& path, const EvalReport& report);
void write_report_csv(const std::filesystem::path& path, const EvalReport& report);

}  // namespace crackdet

#endif  // CRACKDET_EVAL_HPP
