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

#include "rrd/popularity.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "rrd/text.hpp"

namespace rrd::popularity {

std::string_view to_string(FreqKind kind) noexcept {
  return kind == FreqKind::Url ? "url" : "domain";
}

FreqKind parse_freq_kind(std::string_view s) {
  const std::string lower = text::to_lower_ascii(s);
  if (lower == "url") return FreqKind::Url;
  if (lower == "domain") return FreqKind::Domain;
  throw std::invalid_argument("unknown frequency kind: " + std::string(s));
}

std::size_t FrequencyDistribution::total_mentions() const noexcept {
  std::size_t total = 0;
  for (const auto& b : histogram) total += b.frequency * b.keys;
  return total;
}

std::vector<std::size_t> FrequencyDistribution::samples() const {
  std::vector<std::size_t> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.count);
  return out;
}

FrequencyDistribution make_distribution(FreqKind kind,
                                        std::vector<std::pair<std::string, std::size_t>> counts) {
  FrequencyDistribution dist;
  dist.kind = kind;
  std::map<std::size_t, std::size_t> buckets;
  for (auto& [key, count] : counts) {
    if (count == 0) continue;
    ++buckets[count];
    dist.entries.push_back({std::move(key), count});
  }
  std::sort(dist.entries.begin(), dist.entries.end(),
            [](const FrequencyEntry& a, const FrequencyEntry& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.key < b.key;
            });
  for (const auto& [f, n] : buckets) dist.histogram.push_back({f, n});
  return dist;
}

FrequencyDistribution url_frequency(std::span<const store::ResourceRecord> records) {
  std::vector<std::pair<std::string, std::size_t>> counts;
  counts.reserve(records.size());
  for (const auto& r : records) counts.emplace_back(r.normalized_url, r.mention_count);
  return make_distribution(FreqKind::Url, std::move(counts));
}

FrequencyDistribution domain_frequency(std::span<const store::ResourceRecord> records) {
  std::unordered_map<std::string, std::size_t> sums;
  for (const auto& r : records) sums[r.domain] += r.mention_count;
  std::vector<std::pair<std::string, std::size_t>> counts(sums.begin(), sums.end());
  return make_distribution(FreqKind::Domain, std::move(counts));
}

std::vector<LogLogPoint> emit_loglog_points(const FrequencyDistribution& dist) {
  if (dist.histogram.empty()) throw std::invalid_argument("empty frequency distribution");
  std::vector<LogLogPoint> points;
  points.reserve(dist.histogram.size());
  for (const auto& b : dist.histogram) {
    if (b.keys == 0) continue;
    points.push_back({std::log10(static_cast<double>(b.frequency)),
                      std::log10(static_cast<double>(b.keys))});
  }
  return points;
}

std::string loglog_csv(std::span<const LogLogPoint> points) {
  std::ostringstream os;
  os << "log10_f,log10_nf\n" << std::setprecision(17);
  for (const auto& p : points) os << p.log10_f << ',' << p.log10_nf << '\n';
  return os.str();
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) throw std::domain_error("hurwitz_zeta needs s > 1 and q > 0");
  // Euler-Maclaurin: direct terms until q + n >= 10, then the tail expansion.
  constexpr std::array<double, 8> bernoulli_over_factorial = {
      1.0 / 12.0,                    // B2 / 2!
      -1.0 / 720.0,                  // B4 / 4!
      1.0 / 30240.0,                 // B6 / 6!
      -1.0 / 1209600.0,              // B8 / 8!
      1.0 / 47900160.0,              // B10 / 10!
      -691.0 / 1307674368000.0,      // B12 / 12!
      1.0 / 74724249600.0,           // B14 / 14!
      -3617.0 / 10670622842880000.0  // B16 / 16!
  };
  double sum = 0.0;
  double a = q;
  while (a < 10.0) {
    sum += std::pow(a, -s);
    a += 1.0;
  }
  const double a_pow = std::pow(a, -s);
  sum += a * a_pow / (s - 1.0) + 0.5 * a_pow;
  // Term j: B_2j/(2j)! * s(s+1)...(s+2j-2) * a^(-s-2j+1)
  double rising = s;           // s(s+1)...(s+2j-2)
  double power = a_pow / a;    // a^(-s-1)
  const double inv_a2 = 1.0 / (a * a);
  for (std::size_t j = 0; j < bernoulli_over_factorial.size(); ++j) {
    const double term = bernoulli_over_factorial[j] * rising * power;
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
    const double k = static_cast<double>(2 * j + 1);
    rising *= (s + k) * (s + k + 1.0);
    power *= inv_a2;
  }
  return sum;
}

namespace {

constexpr double kAlphaLow = 1.000001;
constexpr double kAlphaHigh = 30.0;

struct Tail {
  std::vector<std::size_t> values;  // distinct, ascending
  std::vector<std::size_t> counts;  // occurrences of each value
};

Tail tabulate(std::span<const std::size_t> samples) {
  std::map<std::size_t, std::size_t> freq;
  for (const std::size_t x : samples) {
    if (x == 0) throw std::invalid_argument("power-law samples must be >= 1");
    ++freq[x];
  }
  Tail t;
  for (const auto& [x, c] : freq) {
    t.values.push_back(x);
    t.counts.push_back(c);
  }
  return t;
}

// Fit on the tail starting at distinct-value index `first`.
PowerLawFit fit_tail(const Tail& t, std::size_t first, double n, double log_sum) {
  const double x_min = static_cast<double>(t.values[first]);
  const auto neg_log_likelihood = [&](double alpha) {
    return n * std::log(hurwitz_zeta(alpha, x_min)) + alpha * log_sum;
  };
  const auto [alpha, nll] =
      boost::math::tools::brent_find_minima(neg_log_likelihood, kAlphaLow, kAlphaHigh, 52);
  (void)nll;

  const double norm = hurwitz_zeta(alpha, x_min);
  double seen = 0.0;
  double ks = 0.0;
  for (std::size_t i = first; i < t.values.size(); ++i) {
    seen += static_cast<double>(t.counts[i]);
    const double empirical = seen / n;
    const double fitted = 1.0 - hurwitz_zeta(alpha, static_cast<double>(t.values[i]) + 1.0) / norm;
    ks = std::max(ks, std::abs(empirical - fitted));
  }
  PowerLawFit fit;
  fit.alpha = alpha;
  fit.x_min = t.values[first];
  fit.n_tail = static_cast<std::size_t>(n);
  fit.ks_distance = std::min(1.0, ks);
  return fit;
}

}  // namespace

PowerLawFit fit_power_law_at(std::span<const std::size_t> samples, std::size_t x_min) {
  std::vector<std::size_t> tail_samples;
  for (const std::size_t x : samples) {
    if (x >= x_min) tail_samples.push_back(x);
  }
  const Tail t = tabulate(tail_samples);
  if (t.values.size() < 2) {
    throw FitError(FitError::Reason::Degenerate,
                   "tail above x_min needs at least two distinct values");
  }
  double log_sum = 0.0;
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    log_sum += static_cast<double>(t.counts[i]) * std::log(static_cast<double>(t.values[i]));
  }
  // The likelihood is normalised from x_min itself, not the smallest sample.
  Tail shifted = t;
  if (shifted.values.front() != x_min) {
    shifted.values.insert(shifted.values.begin(), x_min);
    shifted.counts.insert(shifted.counts.begin(), 0);
  }
  return fit_tail(shifted, 0, static_cast<double>(tail_samples.size()), log_sum);
}

PowerLawFit fit_power_law(std::span<const std::size_t> samples) {
  if (samples.empty()) {
    throw FitError(FitError::Reason::InsufficientData, "no samples to fit");
  }
  const Tail t = tabulate(samples);
  if (t.values.size() == 1) {
    throw FitError(FitError::Reason::Degenerate, "all frequencies are equal");
  }
  if (t.values.size() < 10) {
    throw FitError(FitError::Reason::InsufficientData,
                   "power-law fit needs at least 10 distinct frequency values, got " +
                       std::to_string(t.values.size()));
  }
  const std::size_t d = t.values.size();
  std::vector<double> tail_n(d + 1, 0.0);
  std::vector<double> tail_log(d + 1, 0.0);
  for (std::size_t i = d; i-- > 0;) {
    const double c = static_cast<double>(t.counts[i]);
    tail_n[i] = tail_n[i + 1] + c;
    tail_log[i] = tail_log[i + 1] + c * std::log(static_cast<double>(t.values[i]));
  }
  PowerLawFit best;
  bool have_best = false;
  // The last distinct value alone cannot be fitted.
  for (std::size_t i = 0; i + 1 < d; ++i) {
    const PowerLawFit fit = fit_tail(t, i, tail_n[i], tail_log[i]);
    if (!have_best || fit.ks_distance < best.ks_distance) {
      best = fit;
      have_best = true;
    }
  }
  return best;
}

PowerLawFit fit_power_law(const FrequencyDistribution& dist) {
  const auto samples = dist.samples();
  return fit_power_law(samples);
}

}  // namespace rrd::popularity
