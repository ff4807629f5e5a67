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
//
// Synthetic multipath CSI generation. Each per-antenna channel is a sum of
// path contributions  alpha_k * exp(-j 2 pi f (tauS_k + tauD_k(t)))  where
// static paths have a fixed delay and dynamic paths carry a time-varying
// round-trip delay traced by a moving reflector (a hand gesture).

#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "mimocloak/common.hpp"
#include "mimocloak/rng.hpp"
#include "mimocloak/schedule.hpp"

namespace mimocloak {

enum class PathKind { Static, Dynamic };

/// One propagation path. Static paths leave `dynamic_delay_fn` empty and it
/// evaluates to zero; dynamic paths map packet time to an extra delay.
struct PathComponent {
    cplx attenuation{0.0, 0.0};
    double static_delay = 0.0; // seconds, >= 0
    std::function<double(double)> dynamic_delay_fn;
    PathKind kind = PathKind::Static;

    double dynamic_delay(double t) const { return dynamic_delay_fn ? dynamic_delay_fn(t) : 0.0; }
};

enum class GestureKind { PushPull, Clap, Slide, Tap, PinchSpread, Circle, Square, Zigzag };

inline constexpr std::size_t kNumGestures = 8;

inline const char *gesture_name(GestureKind g) {
    switch (g) {
    case GestureKind::PushPull: return "PushPull";
    case GestureKind::Clap: return "Clap";
    case GestureKind::Slide: return "Slide";
    case GestureKind::Tap: return "Tap";
    case GestureKind::PinchSpread: return "PinchSpread";
    case GestureKind::Circle: return "Circle";
    case GestureKind::Square: return "Square";
    case GestureKind::Zigzag: return "Zigzag";
    }
    return "?";
}

inline GestureKind gesture_from_name(const std::string &name) {
    for (std::size_t i = 0; i < kNumGestures; ++i) {
        auto g = static_cast<GestureKind>(i);
        if (name == gesture_name(g)) return g;
    }
    throw std::invalid_argument("unknown gesture name: " + name);
}

struct Scenario {
    double carrier_freq_hz = 2.4e9;
    std::size_t num_tx_antennas = 1;
    std::vector<std::vector<PathComponent>> paths_per_antenna;
    double noise_std = 0.0;
    std::size_t num_subcarriers = 1;
    double subcarrier_spacing_hz = 312.5e3;

    void validate() const {
        if (num_tx_antennas < 1) throw std::invalid_argument("Scenario: need at least one Tx antenna");
        if (noise_std < 0.0) throw std::invalid_argument("Scenario: noise_std must be >= 0");
        if (num_subcarriers < 1) throw std::invalid_argument("Scenario: need at least one subcarrier");
        if (paths_per_antenna.size() != num_tx_antennas)
            throw std::invalid_argument("Scenario: one path set per antenna required");
        for (const auto &paths : paths_per_antenna) {
            bool has_static = false;
            for (const auto &p : paths) {
                if (p.static_delay < 0.0 || !std::isfinite(p.static_delay))
                    throw std::invalid_argument("Scenario: path delays must be finite and non-negative");
                if (p.kind == PathKind::Static) {
                    if (p.dynamic_delay_fn)
                        throw std::invalid_argument("Scenario: static path with non-empty dynamic delay");
                    has_static = true;
                }
            }
            if (!has_static)
                throw std::invalid_argument("Scenario: every antenna needs at least one static path");
        }
    }
};

/// Channel gains split into their constituents. `clean` equals
/// `static_part + dynamic_part` element-wise by construction; `noisy` adds
/// circular complex Gaussian receiver noise of total variance noise_std^2.
struct CsiTensor {
    CMat clean;
    CMat static_part;
    CMat dynamic_part;
    CMat noisy;
    TemporalSchedule schedule;
    double noise_std = 0.0;

    std::size_t num_antennas() const { return clean.rows(); }
    std::size_t num_packets() const { return clean.cols(); }
};

// ---------------------------------------------------------------------------
// Gesture trajectories
// ---------------------------------------------------------------------------

/// Sampled radial trajectory of the reflecting hand. Positions are radial
/// distances from the array; the round-trip delay is 2 * distance / c.
class GestureTrajectory {
  public:
    GestureTrajectory(std::vector<double> distances, double duration_s)
        : distances_(std::move(distances)), duration_(duration_s) {}

    double distance_at(double t) const {
        if (distances_.empty()) return 0.0;
        const double u = std::clamp(t / duration_, 0.0, 1.0);
        const double x = u * static_cast<double>(distances_.size() - 1);
        const auto i = static_cast<std::size_t>(x);
        if (i + 1 >= distances_.size()) return distances_.back();
        const double frac = x - static_cast<double>(i);
        return distances_[i] * (1.0 - frac) + distances_[i + 1] * frac;
    }

    double delay_at(double t) const { return 2.0 * distance_at(t) / kSpeedOfLight; }

    double duration() const { return duration_; }

  private:
    std::vector<double> distances_;
    double duration_;
};

namespace detail {

struct VelocitySegment {
    double begin; // fraction of the gesture duration
    double end;
    double level; // fraction of peak speed, signed
};

struct GestureProgram {
    std::vector<VelocitySegment> segments;
    double peak_speed_mps = 1.0;
    bool sinusoid = false; // Circle uses a smooth sinusoidal radial velocity
};

/// Velocity programs chosen so the eight classes separate in both peak
/// Doppler and temporal structure. Zigzag has exactly two turning points,
/// push-pull exactly one, slide none.
inline GestureProgram gesture_program(GestureKind g) {
    using S = VelocitySegment;
    switch (g) {
    case GestureKind::PushPull:
        return {{S{0.04, 0.46, 1.0}, S{0.54, 0.96, -1.0}}, 0.9, false};
    case GestureKind::Clap:
        return {{S{0.04, 0.2, -1.0}, S{0.26, 0.44, 1.0}, S{0.5, 0.68, -1.0}, S{0.74, 0.96, 1.0}},
                2.2,
                false};
    case GestureKind::Slide:
        return {{S{0.05, 0.95, 1.0}}, 0.55, false};
    case GestureKind::Tap:
        return {{S{0.03, 0.14, -1.0}, S{0.2, 0.78, 0.0}, S{0.84, 0.97, 0.9}}, 1.6, false};
    case GestureKind::PinchSpread:
        return {{S{0.04, 0.4, -1.0}, S{0.46, 0.54, 0.0}, S{0.6, 0.96, 1.0}}, 0.4, false};
    case GestureKind::Circle:
        return {{}, 0.8, true};
    case GestureKind::Square:
        return {{S{0.03, 0.2, 1.0}, S{0.26, 0.44, 0.0}, S{0.5, 0.68, -1.0}, S{0.74, 0.95, 0.0}},
                1.3,
                false};
    case GestureKind::Zigzag:
        return {{S{0.03, 0.3, 1.0}, S{0.36, 0.63, -1.0}, S{0.69, 0.97, 1.0}}, 1.9, false};
    }
    return {};
}

/// Piecewise-linear velocity through segment knots; ramps form implicitly
/// between neighboring segments and toward rest at both ends.
inline double program_velocity(const GestureProgram &prog, double u, double phase, double speed) {
    if (prog.sinusoid) return speed * std::sin(2.0 * kPi * (u + phase));
    const auto &segs = prog.segments;
    if (segs.empty()) return 0.0;
    if (u <= segs.front().begin) {
        double w = segs.front().begin <= 0.0 ? 1.0 : u / segs.front().begin;
        return speed * segs.front().level * w;
    }
    if (u >= segs.back().end) {
        double tail = 1.0 - segs.back().end;
        double w = tail <= 0.0 ? 0.0 : 1.0 - (u - segs.back().end) / tail;
        return speed * segs.back().level * std::max(0.0, w);
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (u <= segs[i].end) {
            if (u >= segs[i].begin) return speed * segs[i].level;
            // ramp from previous segment
            const double a = segs[i - 1].end;
            const double b = segs[i].begin;
            const double w = (u - a) / (b - a);
            return speed * (segs[i - 1].level * (1.0 - w) + segs[i].level * w);
        }
    }
    return 0.0;
}

} // namespace detail

/// Builds the dynamic reflection path(s) for one gesture instance. The hand
/// follows a gesture-specific radial velocity program with seeded jitter in
/// amplitude, timing, and (for circles) phase; the path delay is the full
/// round trip 2 * distance(t) / c.
inline std::vector<PathComponent> synthesize_gesture_paths(GestureKind gesture, double duration_s,
                                                           double range_m, std::uint64_t rng_seed) {
    if (duration_s <= 0.0) throw std::invalid_argument("synthesize_gesture_paths: duration must be > 0");
    if (range_m <= 0.0) throw std::invalid_argument("synthesize_gesture_paths: range must be > 0");

    Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(gesture)));
    auto prog = detail::gesture_program(gesture);

    const double amp_jitter = rng.uniform(0.9, 1.1);
    const double speed = prog.peak_speed_mps * amp_jitter * rng.uniform(0.95, 1.05);
    const double phase = prog.sinusoid ? rng.uniform(0.1, 0.4) : 0.0;
    for (auto &s : prog.segments) {
        const double shift = rng.uniform(-0.02, 0.02);
        s.begin = std::clamp(s.begin + shift, 0.0, 1.0);
        s.end = std::clamp(s.end + shift, s.begin, 1.0);
    }

    // integrate velocity to radial displacement on a dense grid
    constexpr std::size_t kGrid = 4096;
    std::vector<double> dist(kGrid + 1);
    double disp = 0.0;
    double v_prev = detail::program_velocity(prog, 0.0, phase, speed);
    dist[0] = range_m;
    const double du = 1.0 / static_cast<double>(kGrid);
    for (std::size_t i = 1; i <= kGrid; ++i) {
        const double u = static_cast<double>(i) * du;
        const double v = detail::program_velocity(prog, u, phase, speed);
        disp += 0.5 * (v + v_prev) * du * duration_s;
        v_prev = v;
        dist[i] = range_m + disp;
    }

    auto traj = std::make_shared<GestureTrajectory>(std::move(dist), duration_s);
    PathComponent p;
    p.kind = PathKind::Dynamic;
    p.attenuation = cplx(1.0, 0.0); // caller scales and phases it
    p.static_delay = 0.0;
    p.dynamic_delay_fn = [traj](double t) { return traj->delay_at(t); };
    return {p};
}

/// Counts sign changes of the radial velocity (finite-differenced from the
/// path delay) with hysteresis, skipping ramps and rest periods.
inline int count_velocity_sign_changes(const PathComponent &path, double duration_s,
                                       double speed_threshold_mps = 0.1) {
    constexpr std::size_t kSamples = 2048;
    const double dt = duration_s / static_cast<double>(kSamples);
    int changes = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i < kSamples; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double d0 = path.dynamic_delay(t - dt);
        const double d1 = path.dynamic_delay(t);
        const double v = (d1 - d0) / dt * kSpeedOfLight / 2.0; // radial speed
        int sign = 0;
        if (v > speed_threshold_mps) sign = 1;
        else if (v < -speed_threshold_mps) sign = -1;
        if (sign != 0) {
            if (last_sign != 0 && sign != last_sign) ++changes;
            last_sign = sign;
        }
    }
    return changes;
}

// ---------------------------------------------------------------------------
// Scenario construction
// ---------------------------------------------------------------------------

struct GestureScenarioParams {
    GestureKind gesture = GestureKind::PushPull;
    double duration_s = 1.5;
    double range_m = 0.5;
    std::size_t num_tx_antennas = 8;
    double carrier_freq_hz = 2.4e9;
    double noise_std = 0.05;
    std::size_t num_static_paths = 3;
    double dynamic_attenuation = 0.35; // at the 0.5 m reference range
    double los_scale = 1.0;            // < 1 emulates an obstructed direct path
    std::uint64_t seed = 0;
};

/// Full multipath scenario around one gesture instance. All antennas share
/// the reflector trajectory and the static reflector set; per-antenna
/// geometry enters as half-wavelength path-length offsets, so the Q channels
/// are correlated but not identical.
inline Scenario make_gesture_scenario(const GestureScenarioParams &prm) {
    if (prm.num_static_paths < 1)
        throw std::invalid_argument("make_gesture_scenario: need at least one static path");
    Rng rng(derive_seed(prm.seed, 0xc5a9u));
    Scenario sc;
    sc.carrier_freq_hz = prm.carrier_freq_hz;
    sc.num_tx_antennas = prm.num_tx_antennas;
    sc.noise_std = prm.noise_std;

    const double lambda = kSpeedOfLight / prm.carrier_freq_hz;

    struct StaticSpec {
        double base_delay;
        double sin_aoa;
        cplx alpha;
    };
    std::vector<StaticSpec> statics(prm.num_static_paths);
    for (std::size_t k = 0; k < prm.num_static_paths; ++k) {
        const double dist = rng.uniform(1.5, 10.0);
        // offset factor in [0, 1]: keeps all per-antenna delays non-negative
        // (equivalent to placing the array reference at the trailing element)
        const double sin_aoa = 0.5 * (1.0 + std::sin(rng.uniform(-kPi / 3.0, kPi / 3.0)));
        // |alpha| log-uniform in [0.1, 1]
        const double mag = std::pow(10.0, rng.uniform(-1.0, 0.0));
        cplx alpha = mag * rng.unit_phase();
        if (k == 0) alpha *= prm.los_scale;
        statics[k] = {dist / kSpeedOfLight, sin_aoa, alpha};
    }

    auto dyn_paths = synthesize_gesture_paths(prm.gesture, prm.duration_s, prm.range_m,
                                              derive_seed(prm.seed, 0xd11du));
    // the reflector sits near broadside at close range, so its per-antenna
    // offsets stay a small fraction of a wavelength and the unscrambled
    // all-antenna mix adds up coherently
    const double dyn_sin_aoa = rng.uniform(0.0, 0.15);
    const double range_falloff = (0.5 / prm.range_m) * (0.5 / prm.range_m);
    const cplx dyn_alpha =
        std::min(1.0, prm.dynamic_attenuation * range_falloff) * rng.unit_phase();

    sc.paths_per_antenna.resize(prm.num_tx_antennas);
    for (std::size_t q = 0; q < prm.num_tx_antennas; ++q) {
        auto &paths = sc.paths_per_antenna[q];
        const double antenna_offset = static_cast<double>(q) * (lambda / 2.0) / kSpeedOfLight;
        for (const auto &st : statics) {
            PathComponent p;
            p.kind = PathKind::Static;
            p.attenuation = st.alpha;
            p.static_delay = st.base_delay + antenna_offset * st.sin_aoa;
            paths.push_back(p);
        }
        for (const auto &dp : dyn_paths) {
            PathComponent p = dp;
            p.attenuation = dyn_alpha;
            p.static_delay = dp.static_delay + antenna_offset * dyn_sin_aoa;
            paths.push_back(p);
        }
    }
    sc.validate();
    return sc;
}

// ---------------------------------------------------------------------------
// CSI generation
// ---------------------------------------------------------------------------

/// Superposes all paths per antenna and packet time. The optional subcarrier
/// index evaluates the phase at f_c + n * subcarrier spacing; packets share
/// one schedule.
inline CsiTensor generate_csi(const Scenario &scenario, std::size_t num_packets,
                              const TemporalSchedule &schedule, std::uint64_t rng_seed,
                              std::size_t subcarrier_index = 0) {
    scenario.validate();
    if (num_packets < 1) throw std::invalid_argument("generate_csi: need at least one packet");
    if (schedule.size() != num_packets)
        throw std::invalid_argument("generate_csi: schedule length must equal packet count");
    if (subcarrier_index >= scenario.num_subcarriers)
        throw std::invalid_argument("generate_csi: subcarrier index out of range");

    const double f = scenario.carrier_freq_hz +
                     static_cast<double>(subcarrier_index) * scenario.subcarrier_spacing_hz;
    const std::size_t Q = scenario.num_tx_antennas;
    const std::size_t M = num_packets;

    CsiTensor csi;
    csi.schedule = schedule;
    csi.noise_std = scenario.noise_std;
    csi.clean = CMat(Q, M);
    csi.static_part = CMat(Q, M);
    csi.dynamic_part = CMat(Q, M);
    csi.noisy = CMat(Q, M);

    for (std::size_t q = 0; q < Q; ++q) {
        cplx static_sum(0.0, 0.0);
        for (const auto &p : scenario.paths_per_antenna[q]) {
            if (p.kind != PathKind::Static) continue;
            const double phi = -2.0 * kPi * f * p.static_delay;
            static_sum += p.attenuation * cplx(std::cos(phi), std::sin(phi));
        }
        for (std::size_t m = 0; m < M; ++m) {
            const double t = schedule.timestamps[m];
            cplx dyn_sum(0.0, 0.0);
            for (const auto &p : scenario.paths_per_antenna[q]) {
                if (p.kind != PathKind::Dynamic) continue;
                const double tau = p.static_delay + p.dynamic_delay(t);
                const double phi = -2.0 * kPi * f * tau;
                dyn_sum += p.attenuation * cplx(std::cos(phi), std::sin(phi));
            }
            csi.static_part(q, m) = static_sum;
            csi.dynamic_part(q, m) = dyn_sum;
            csi.clean(q, m) = static_sum + dyn_sum;
        }
    }

    Rng noise_rng(derive_seed(rng_seed, 0x0153u));
    for (std::size_t q = 0; q < Q; ++q)
        for (std::size_t m = 0; m < M; ++m)
            csi.noisy(q, m) = csi.clean(q, m) + (scenario.noise_std > 0.0
                                                     ? noise_rng.complex_normal(scenario.noise_std)
                                                     : cplx(0.0, 0.0));
    return csi;
}

/// Replaces the noisy component with clean + fresh circular Gaussian noise of
/// total variance sigma^2. sigma = 0 copies clean bit-for-bit.
inline CsiTensor add_noise(const CsiTensor &csi, double sigma, std::uint64_t rng_seed) {
    if (sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be >= 0");
    CsiTensor out = csi;
    out.noise_std = sigma;
    Rng rng(derive_seed(rng_seed, 0x0153u));
    const std::size_t Q = csi.num_antennas();
    const std::size_t M = csi.num_packets();
    for (std::size_t q = 0; q < Q; ++q)
        for (std::size_t m = 0; m < M; ++m)
            out.noisy(q, m) =
                csi.clean(q, m) + (sigma > 0.0 ? rng.complex_normal(sigma) : cplx(0.0, 0.0));
    return out;
}

/// Columnar text export, one row per (antenna, packet).
inline void write_csi_csv(const CsiTensor &csi, std::ostream &os) {
    os << "q,m,t,re_clean,im_clean,re_noisy,im_noisy,re_dyn,im_dyn,re_stat,im_stat\n";
    for (std::size_t q = 0; q < csi.num_antennas(); ++q) {
        for (std::size_t m = 0; m < csi.num_packets(); ++m) {
            os << q << ',' << m << ',' << fmt_g17(csi.schedule.timestamps[m]) << ','
               << fmt_g17(csi.clean(q, m).real()) << ',' << fmt_g17(csi.clean(q, m).imag()) << ','
               << fmt_g17(csi.noisy(q, m).real()) << ',' << fmt_g17(csi.noisy(q, m).imag()) << ','
               << fmt_g17(csi.dynamic_part(q, m).real()) << ','
               << fmt_g17(csi.dynamic_part(q, m).imag()) << ','
               << fmt_g17(csi.static_part(q, m).real()) << ','
               << fmt_g17(csi.static_part(q, m).imag()) << '\n';
        }
    }
}

} // namespace mimocloak
