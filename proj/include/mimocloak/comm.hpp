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
// Flat-fading packet link. Each packet carries one training symbol through
// the scrambled beamformer (the channel-estimation leg) and a payload burst
// through a fixed unscrambled beamformer. Receivers equalize the payload
// with whatever channel estimate their role grants them:
//   BobKeyed    — block least-squares recovery using the scrambler,
//                 projected onto the payload beamformer,
//   BobKeyless  — raw training-symbol division (scrambled estimate),
//   Eve         — same raw division, no key by definition.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mimocloak/channel.hpp"
#include "mimocloak/common.hpp"
#include "mimocloak/crypto.hpp"
#include "mimocloak/metrics.hpp"
#include "mimocloak/rng.hpp"

namespace mimocloak {

// ---------------------------------------------------------------------------
// Modulation
// ---------------------------------------------------------------------------

enum class ModScheme { BPSK, QAM32, QAM64 };

inline const char *mod_name(ModScheme m) {
    switch (m) {
    case ModScheme::BPSK: return "BPSK";
    case ModScheme::QAM32: return "QAM32";
    case ModScheme::QAM64: return "QAM64";
    }
    return "?";
}

/// Gray-labeled constellation with unit average symbol energy. Points are
/// indexed by their bit label; QAM32 is the rectangular 8x4 grid so the Gray
/// property holds exactly on both axes.
struct Modulation {
    ModScheme scheme = ModScheme::BPSK;
    int bits_per_symbol = 1;
    std::vector<cplx> points;

    std::size_t order() const { return points.size(); }
};

namespace detail {

/// Binary-reflected Gray label for the i-th PAM level (natural level order).
inline unsigned gray_code(unsigned i) { return i ^ (i >> 1); }

inline std::vector<double> pam_levels(unsigned n) {
    std::vector<double> lv(n);
    for (unsigned i = 0; i < n; ++i) lv[i] = -static_cast<double>(n - 1) + 2.0 * i;
    return lv;
}

inline Modulation make_rect_qam(ModScheme scheme, unsigned bits_i, unsigned bits_q) {
    const unsigned ni = 1u << bits_i;
    const unsigned nq = 1u << bits_q;
    const auto li = pam_levels(ni);
    const auto lq = pam_levels(nq);
    double mean_energy = 0.0;
    for (double x : li) mean_energy += x * x;
    mean_energy /= ni;
    double eq = 0.0;
    for (double x : lq) eq += x * x;
    mean_energy += eq / nq;
    const double scale = 1.0 / std::sqrt(mean_energy);

    Modulation mod;
    mod.scheme = scheme;
    mod.bits_per_symbol = static_cast<int>(bits_i + bits_q);
    mod.points.assign(static_cast<std::size_t>(ni) * nq, cplx(0, 0));
    for (unsigned ii = 0; ii < ni; ++ii) {
        for (unsigned qq = 0; qq < nq; ++qq) {
            const unsigned label = (gray_code(ii) << bits_q) | gray_code(qq);
            mod.points[label] = cplx(li[ii] * scale, lq[qq] * scale);
        }
    }
    return mod;
}

} // namespace detail

inline Modulation make_modulation(ModScheme scheme) {
    switch (scheme) {
    case ModScheme::BPSK: {
        Modulation mod;
        mod.scheme = scheme;
        mod.bits_per_symbol = 1;
        mod.points = {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
        return mod;
    }
    case ModScheme::QAM32: return detail::make_rect_qam(scheme, 3, 2);
    case ModScheme::QAM64: return detail::make_rect_qam(scheme, 3, 3);
    }
    throw std::invalid_argument("make_modulation: unknown scheme");
}

/// Packs bits (MSB first per symbol) into constellation points.
inline CVec map_bits(const std::vector<std::uint8_t> &bits, const Modulation &mod) {
    const auto bps = static_cast<std::size_t>(mod.bits_per_symbol);
    if (bits.size() % bps != 0)
        throw std::invalid_argument("map_bits: bit count must be a multiple of bits_per_symbol");
    CVec out(bits.size() / bps);
    for (std::size_t s = 0; s < out.size(); ++s) {
        unsigned label = 0;
        for (std::size_t b = 0; b < bps; ++b) label = (label << 1) | bits[s * bps + b];
        out[s] = mod.points[label];
    }
    return out;
}

/// Minimum-Euclidean-distance demapping back to bit labels.
inline std::vector<std::uint8_t> demap_symbols(const CVec &symbols, const Modulation &mod) {
    const auto bps = static_cast<std::size_t>(mod.bits_per_symbol);
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * bps);
    for (const cplx &y : symbols) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::max();
        for (std::size_t i = 0; i < mod.points.size(); ++i) {
            const double d = std::norm(y - mod.points[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        for (std::size_t b = 0; b < bps; ++b)
            bits.push_back(static_cast<std::uint8_t>((best >> (bps - 1 - b)) & 1));
    }
    return bits;
}

// ---------------------------------------------------------------------------
// Packet transmission
// ---------------------------------------------------------------------------

struct PacketSignal {
    cplx lts_symbol{1.0, 0.0};
    CVec payload_symbols;
    std::size_t packet_index = 0;
};

struct ReceivedPacket {
    cplx lts_observation{0.0, 0.0};
    CVec payload_observations;
};

/// LTS leg goes through the scrambler; payload goes through the fixed
/// beamformer (all-ones unless given). Both legs see the same receiver noise
/// level.
inline ReceivedPacket transmit_packet(const PacketSignal &pkt, const CsiTensor &csi,
                                      const EncryptionMatrix &psi, double sigma,
                                      std::uint64_t rng_seed, const CVec *payload_beamformer = nullptr) {
    const std::size_t Q = csi.num_antennas();
    const std::size_t M = csi.num_packets();
    if (pkt.packet_index >= M) throw std::invalid_argument("transmit_packet: packet index out of range");
    if (pkt.payload_symbols.empty())
        throw std::invalid_argument("transmit_packet: payload must be non-empty");
    if (csi.num_antennas() != psi.num_antennas() || M != psi.num_packets())
        throw std::invalid_argument("transmit_packet: CSI and psi must agree on Q and M");
    if (payload_beamformer && payload_beamformer->size() != Q)
        throw std::invalid_argument("transmit_packet: beamformer length must equal Q");

    const std::size_t m = pkt.packet_index;
    cplx lts_chan(0.0, 0.0);
    cplx pay_chan(0.0, 0.0);
    for (std::size_t q = 0; q < Q; ++q) {
        lts_chan += csi.clean(q, m) * psi.coeffs(q, m);
        pay_chan += csi.clean(q, m) * (payload_beamformer ? (*payload_beamformer)[q] : cplx(1.0, 0.0));
    }

    Rng rng(derive_seed(rng_seed, m));
    ReceivedPacket rx;
    rx.lts_observation =
        lts_chan * pkt.lts_symbol + (sigma > 0.0 ? rng.complex_normal(sigma) : cplx(0, 0));
    rx.payload_observations.resize(pkt.payload_symbols.size());
    for (std::size_t i = 0; i < pkt.payload_symbols.size(); ++i)
        rx.payload_observations[i] = pay_chan * pkt.payload_symbols[i] +
                                     (sigma > 0.0 ? rng.complex_normal(sigma) : cplx(0, 0));
    return rx;
}

inline cplx estimate_csi_from_lts(cplx y_lts, cplx s) {
    if (s == cplx(0.0, 0.0)) throw std::invalid_argument("estimate_csi_from_lts: zero training symbol");
    return y_lts / s;
}

class EqualizationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline std::vector<std::uint8_t> equalize_and_demod(const CVec &y_payload, cplx channel_estimate,
                                                    const Modulation &mod) {
    if (channel_estimate == cplx(0.0, 0.0))
        throw EqualizationError("equalize_and_demod: zero channel estimate");
    CVec eq(y_payload.size());
    for (std::size_t i = 0; i < y_payload.size(); ++i) eq[i] = y_payload[i] / channel_estimate;
    return demap_symbols(eq, mod);
}

// ---------------------------------------------------------------------------
// End-to-end link
// ---------------------------------------------------------------------------

enum class Role { BobKeyed, BobKeyless, Eve };

inline const char *role_name(Role r) {
    switch (r) {
    case Role::BobKeyed: return "BobKeyed";
    case Role::BobKeyless: return "BobKeyless";
    case Role::Eve: return "Eve";
    }
    return "?";
}

struct BerReport {
    TaskScore score;
    double payload_snr_db = 0.0;
    Role role = Role::Eve;
    ModScheme modulation = ModScheme::BPSK;
    bool keyed_fallback_used = false; // singular scrambler blocks, raw estimates used
};

struct LinkParams {
    std::size_t num_packets = 256;
    std::size_t payload_len = 64; // symbols per packet
    double sigma = 0.01;
    double base_interval_s = 1e-3;
    std::size_t block_len = 0; // 0 -> 4 * Q
};

/// Noise level hitting a target payload SNR (dB) for a given clean channel,
/// assuming unit-energy symbols through the all-ones beamformer.
inline double sigma_for_payload_snr(const CsiTensor &csi, double target_db) {
    const std::size_t M = csi.num_packets();
    double mean_chan = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        cplx h(0.0, 0.0);
        for (std::size_t q = 0; q < csi.num_antennas(); ++q) h += csi.clean(q, m);
        mean_chan += std::norm(h);
    }
    mean_chan /= static_cast<double>(M);
    return std::sqrt(mean_chan / db_to_lin(target_db));
}

/// Runs the packet link end to end for one role and reports the payload BER.
/// BobKeyed recovers per-antenna channels by block least squares on the
/// training-leg estimates and projects them onto the payload beamformer;
/// if every useful block is singular (an effectively unscrambled matrix),
/// it falls back to the raw estimates, which keeps the roles symmetric in
/// the no-encryption case.
inline BerReport run_link(const Scenario &scenario, const EncryptionMatrix &psi, Role role,
                          const Modulation &mod, const LinkParams &prm, std::uint64_t seed) {
    const std::size_t M = prm.num_packets;
    const std::size_t Q = scenario.num_tx_antennas;
    auto schedule = regular_schedule(M, prm.base_interval_s);
    CsiTensor csi = generate_csi(scenario, M, schedule, derive_seed(seed, 0xc41u));

    Rng bit_rng(derive_seed(seed, 0xb175u));
    const auto bps = static_cast<std::size_t>(mod.bits_per_symbol);
    std::vector<std::uint8_t> tx_bits(M * prm.payload_len * bps);
    for (auto &b : tx_bits) b = static_cast<std::uint8_t>(bit_rng.next_u64() & 1);

    // transmit every packet
    std::vector<ReceivedPacket> rx(M);
    CVec raw_estimates(M);
    double payload_sig_energy = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        PacketSignal pkt;
        pkt.packet_index = m;
        const std::vector<std::uint8_t> pkt_bits(
            tx_bits.begin() + static_cast<std::ptrdiff_t>(m * prm.payload_len * bps),
            tx_bits.begin() + static_cast<std::ptrdiff_t>((m + 1) * prm.payload_len * bps));
        pkt.payload_symbols = map_bits(pkt_bits, mod);
        rx[m] = transmit_packet(pkt, csi, psi, prm.sigma, derive_seed(seed, 0x77f2u, m));
        raw_estimates[m] = estimate_csi_from_lts(rx[m].lts_observation, pkt.lts_symbol);
        cplx h(0.0, 0.0);
        for (std::size_t q = 0; q < Q; ++q) h += csi.clean(q, m);
        payload_sig_energy += std::norm(h);
    }

    BerReport report;
    report.role = role;
    report.modulation = mod.scheme;
    report.payload_snr_db =
        prm.sigma > 0.0
            ? lin_to_db(payload_sig_energy / (static_cast<double>(M) * prm.sigma * prm.sigma))
            : kSaturatedDb;

    CVec channel_estimates = raw_estimates;
    if (role == Role::BobKeyed) {
        const std::size_t block_len = prm.block_len > 0 ? prm.block_len : 4 * Q;
        EncryptedCsiSeries series;
        series.values = raw_estimates;
        series.schedule = schedule;
        try {
            auto rec = decrypt_block_ls(series, psi, block_len);
            for (std::size_t m = 0; m < M; ++m) {
                cplx h(0.0, 0.0);
                for (std::size_t q = 0; q < Q; ++q) h += rec.recovered(q, m);
                channel_estimates[m] = h;
            }
        } catch (const SingularBlockError &) {
            report.keyed_fallback_used = true;
        }
    }

    std::vector<std::uint8_t> rx_bits;
    rx_bits.reserve(tx_bits.size());
    for (std::size_t m = 0; m < M; ++m) {
        auto bits = equalize_and_demod(rx[m].payload_observations, channel_estimates[m], mod);
        rx_bits.insert(rx_bits.end(), bits.begin(), bits.end());
    }
    report.score = score_bits(tx_bits, rx_bits);
    return report;
}

} // namespace mimocloak
