// Copyright 2026 The qcnn2d authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qcnn {

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean_of: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Unbiased sample standard deviation (0 for a single observation).
inline double sample_stddev(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("sample_stddev: empty sample");
  if (v.size() == 1) return 0.0;
  double m = mean_of(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double standard_error(const std::vector<double>& v) {
  return sample_stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

// Asymptotic Kolmogorov survival function Q(x) = 2 sum_{j>=1} (-1)^{j-1}
// exp(-2 j^2 x^2), clamped to [0, 1].
inline double kolmogorov_q(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;  // sup |F1 - F2|
  double p_value = 1.0;    // asymptotic, with small-sample correction
  std::size_t n1 = 0, n2 = 0;
};

// Two-sample Kolmogorov-Smirnov test. Ties are handled by comparing the
// empirical CDFs only between distinct values.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  KsResult res;
  res.n1 = a.size();
  res.n2 = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    double f1 = static_cast<double>(i) / static_cast<double>(a.size());
    double f2 = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(f1 - f2));
  }
  res.statistic = d;
  double n1 = static_cast<double>(res.n1), n2 = static_cast<double>(res.n2);
  double en = std::sqrt(n1 * n2 / (n1 + n2));
  res.p_value = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
  return res;
}

}  // namespace qcnn
