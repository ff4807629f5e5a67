// SPDX-License-Identifier: Apache-2.0
//
// mimocloak — spatial-temporal Wi-Fi channel encryption simulator and sensing library
// Copyright (C) 2026 mimocloak contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "mimocloak/common.hpp"
#include "mimocloak/rng.hpp"

namespace mimocloak {

/// Packet timing with randomized intervals: t_m = (m + beta_m) * dt,
/// beta_m in [-gamma, gamma]. gamma < 0.5 keeps timestamps strictly
/// increasing by construction; larger gamma triggers a recorded sort repair.
struct TemporalSchedule {
    double base_interval_s = 1e-3;
    double gamma = 0.0;
    std::vector<double> betas;
    std::vector<double> timestamps;
    bool repaired = false;

    std::size_t size() const { return timestamps.size(); }
    double duration() const { return timestamps.empty() ? 0.0 : timestamps.back() - timestamps.front(); }
};

/// Regular grid t_m = m * dt.
inline TemporalSchedule regular_schedule(std::size_t num_packets, double base_interval_s) {
    if (base_interval_s <= 0.0)
        throw std::invalid_argument("regular_schedule: base interval must be positive");
    TemporalSchedule s;
    s.base_interval_s = base_interval_s;
    s.gamma = 0.0;
    s.betas.assign(num_packets, 0.0);
    s.timestamps.resize(num_packets);
    for (std::size_t m = 0; m < num_packets; ++m)
        s.timestamps[m] = static_cast<double>(m) * base_interval_s;
    return s;
}

/// i.i.d. beta_m ~ U[-gamma, gamma]. gamma = 0 reproduces the regular grid
/// exactly. For gamma >= 0.5 adjacent timestamps may invert; a sort plus
/// minimal strictness nudge restores monotonicity, betas are recomputed from
/// the repaired timestamps, and the schedule is flagged `repaired`.
inline TemporalSchedule randomize_schedule(std::size_t num_packets, double base_interval_s,
                                           double gamma, std::uint64_t rng_seed) {
    if (gamma < 0.0 || gamma > 0.9)
        throw std::invalid_argument("randomize_schedule: gamma must lie in [0, 0.9]");
    if (base_interval_s <= 0.0)
        throw std::invalid_argument("randomize_schedule: base interval must be positive");
    TemporalSchedule s;
    s.base_interval_s = base_interval_s;
    s.gamma = gamma;
    s.betas.resize(num_packets);
    s.timestamps.resize(num_packets);
    Rng rng(rng_seed);
    for (std::size_t m = 0; m < num_packets; ++m) {
        double beta = gamma == 0.0 ? 0.0 : rng.uniform(-gamma, gamma);
        s.betas[m] = beta;
        s.timestamps[m] = (static_cast<double>(m) + beta) * base_interval_s;
    }
    bool sorted = std::is_sorted(s.timestamps.begin(), s.timestamps.end());
    if (!sorted) {
        std::sort(s.timestamps.begin(), s.timestamps.end());
        s.repaired = true;
    }
    const double nudge = 1e-9 * base_interval_s;
    for (std::size_t m = 1; m < num_packets; ++m) {
        if (s.timestamps[m] <= s.timestamps[m - 1]) {
            s.timestamps[m] = s.timestamps[m - 1] + nudge;
            s.repaired = true;
        }
    }
    if (s.repaired) {
        for (std::size_t m = 0; m < num_packets; ++m)
            s.betas[m] = s.timestamps[m] / base_interval_s - static_cast<double>(m);
    }
    return s;
}

/// Eve's view of an irregular schedule: the values are taken as if sampled on
/// the regular grid the receiver assumes.
inline TemporalSchedule assumed_regular(const TemporalSchedule &s) {
    return regular_schedule(s.size(), s.base_interval_s);
}

} // namespace mimocloak
