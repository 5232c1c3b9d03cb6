// Copyright 2026 The RRD Toolkit Authors
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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rrd/store.hpp"

// Popularity distributions over merged resources and a discrete power-law
// fit for their tails.
namespace rrd::popularity {

enum class FreqKind { Url, Domain };

std::string_view to_string(FreqKind kind) noexcept;
FreqKind parse_freq_kind(std::string_view s);

struct FrequencyEntry {
  std::string key;
  std::size_t count = 0;

  friend bool operator==(const FrequencyEntry&, const FrequencyEntry&) = default;
};

/// `keys` items were mentioned exactly `frequency` times.
struct HistogramBucket {
  std::size_t frequency = 0;
  std::size_t keys = 0;

  friend bool operator==(const HistogramBucket&, const HistogramBucket&) = default;
};

struct FrequencyDistribution {
  FreqKind kind = FreqKind::Url;
  std::vector<FrequencyEntry> entries;     // descending count, then key
  std::vector<HistogramBucket> histogram;  // ascending frequency

  std::size_t total_mentions() const noexcept;
  /// One value per entry: its count.
  std::vector<std::size_t> samples() const;
};

/// Builds a distribution from (key, count) pairs; zero counts are dropped.
FrequencyDistribution make_distribution(FreqKind kind,
                                        std::vector<std::pair<std::string, std::size_t>> counts);

FrequencyDistribution url_frequency(std::span<const store::ResourceRecord> records);
/// A domain's count is the sum of the mention counts of its URLs.
FrequencyDistribution domain_frequency(std::span<const store::ResourceRecord> records);

struct LogLogPoint {
  double log10_f = 0;
  double log10_nf = 0;
};

/// One point per histogram bucket, ascending in f. Throws std::invalid_argument
/// on an empty distribution.
std::vector<LogLogPoint> emit_loglog_points(const FrequencyDistribution& dist);
std::string loglog_csv(std::span<const LogLogPoint> points);

struct PowerLawFit {
  double alpha = 0;
  std::size_t x_min = 1;
  std::size_t n_tail = 0;
  double ks_distance = 0;
};

class FitError : public std::runtime_error {
 public:
  enum class Reason { InsufficientData, Degenerate };
  FitError(Reason reason, const std::string& message)
      : std::runtime_error(message), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

/// Hurwitz zeta function sum_{k>=0} (q + k)^-s for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// Discrete maximum-likelihood exponent for the samples >= x_min, with the
/// Kolmogorov-Smirnov distance between the tail and the fitted law.
PowerLawFit fit_power_law_at(std::span<const std::size_t> samples, std::size_t x_min);

/// Scans x_min over the distinct sample values and keeps the fit with the
/// smallest KS distance. Needs at least 10 distinct values.
PowerLawFit fit_power_law(std::span<const std::size_t> samples);
PowerLawFit fit_power_law(const FrequencyDistribution& dist);

}  // namespace rrd::popularity
