/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ddf::bench {

struct HockneyFit {
  double alpha = 0;     // seconds per message
  double beta = 0;      // seconds per byte
  double residual = 0;  // RMS of (T - alpha - n*beta)
};

/// Least-squares fit of T = alpha + n*beta over (message bytes, seconds)
/// samples. Estimates clamp at zero.
HockneyFit fit_hockney(std::span<const double> bytes,
                       std::span<const double> seconds);

struct CalibrationResult {
  double alpha = 0;
  double beta = 0;
  double kappa = 0;        // seconds per row-unit, from a local sort fit
  double fit_residual = 0;
};

/// Measurement function: round-trip-half time for one message size.
using PingMeasure = std::function<double(int64_t bytes)>;

/// Sweeps message sizes {1 B .. 4 MiB} through `measure` and fits the
/// Hockney parameters. Separated from the live transport so tests can
/// inject synthetic timers.
HockneyFit calibrate_from_measure(const PingMeasure& measure);

/// Times a local sort of `rows` random rows and returns seconds per
/// n*log2(n) row-unit.
double calibrate_kappa(int64_t rows = 1 << 16);

/// Live calibration: ping-pong between ranks 0 and 1 over the requested
/// transport ("local" or "tcp" over loopback), plus the local sort fit.
CalibrationResult calibrate(const std::string& transport);

}  // namespace ddf::bench
