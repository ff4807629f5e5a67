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
// Signal-quality and task-quality metrics.
//
// Sensing SNR:    etaS  = (1/M) sum_m |hD_m|^2 / (|hS_m|^2 + sigma^2),
//                 per antenna, then averaged over antennas.
// SDNR:           adds the scrambling distortion |enc_m - ref_m|^2 to the
//                 denominator; with zero distortion it degenerates to the
//                 sensing SNR exactly.
// Eve variant:    aggregate-energy form with a 1/(Q*M) prefactor, evaluated
//                 on the unrecovered mix.
// Bob variant:    same prefactor, evaluated on the block-LS recovery; the
//                 residue distortion is the recovery residual against the
//                 clean reference (the pseudo-inverse noise amplification of
//                 the block design matrices realizes the inverse-scrambler
//                 noise term).

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mimocloak/channel.hpp"
#include "mimocloak/common.hpp"
#include "mimocloak/crypto.hpp"

namespace mimocloak {

struct SdnrReport {
    double value_linear = 0.0;
    double value_db = 0.0;
    std::size_t num_packets = 0;
    double dynamic_energy = 0.0;
    double distortion_energy = 0.0;
    double static_energy = 0.0;
    double noise_energy = 0.0;
};

struct TaskScore {
    double accuracy = 0.0;
    double ber = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
    std::size_t error_bits = 0;
    std::size_t total_bits = 0;
};

namespace detail {

inline double saturating_db(double linear) {
    if (!(linear < kSaturatedLinear)) return kSaturatedDb;
    if (linear <= 0.0) return -kSaturatedDb;
    return lin_to_db(linear);
}

/// Unweighted all-antenna mix of one component; the unencrypted reference a
/// single Rx antenna would observe with every Tx antenna active.
inline CVec reference_mix(const CMat &component) {
    const std::size_t Q = component.rows();
    const std::size_t M = component.cols();
    CVec out(M, cplx(0.0, 0.0));
    for (std::size_t q = 0; q < Q; ++q)
        for (std::size_t m = 0; m < M; ++m) out[m] += component(q, m);
    return out;
}

} // namespace detail

/// Mean dynamic-to-(static+noise) energy ratio per antenna, then averaged
/// over antennas. A vanishing denominator with live dynamic energy returns
/// the saturation sentinel instead of infinity.
inline double sensing_snr(const CsiTensor &csi) {
    const std::size_t Q = csi.num_antennas();
    const std::size_t M = csi.num_packets();
    const double s2 = csi.noise_std * csi.noise_std;
    double acc_q = 0.0;
    for (std::size_t q = 0; q < Q; ++q) {
        double acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const double num = std::norm(csi.dynamic_part(q, m));
            const double den = std::norm(csi.static_part(q, m)) + s2;
            if (den <= 0.0) {
                if (num <= 0.0) continue;
                return kSaturatedLinear;
            }
            acc += num / den;
        }
        acc_q += acc / static_cast<double>(M);
    }
    return acc_q / static_cast<double>(Q);
}

/// Per-packet SDNR (mean of ratios). `enc_dynamic` is the scrambled dynamic
/// component, well-defined by linearity of the mix.
inline SdnrReport sdnr_per_packet(const CVec &enc, const CVec &enc_dynamic,
                                  const CsiTensor &reference, double sigma) {
    const std::size_t M = reference.num_packets();
    if (enc.size() != M || enc_dynamic.size() != M)
        throw std::invalid_argument("sdnr_per_packet: series length mismatch");
    const CVec ref = detail::reference_mix(reference.clean);
    const CVec ref_static = detail::reference_mix(reference.static_part);
    const double s2 = sigma * sigma;
    SdnrReport r;
    r.num_packets = M;
    double acc = 0.0;
    bool saturated = false;
    for (std::size_t m = 0; m < M; ++m) {
        const double num = std::norm(enc_dynamic[m]);
        const double dist = std::norm(enc[m] - ref[m]);
        const double stat = std::norm(ref_static[m]);
        r.dynamic_energy += num;
        r.distortion_energy += dist;
        r.static_energy += stat;
        const double den = dist + stat + s2;
        if (den <= 0.0) {
            if (num > 0.0) saturated = true;
            continue;
        }
        acc += num / den;
    }
    r.noise_energy = s2 * static_cast<double>(M);
    r.value_linear = saturated ? kSaturatedLinear : acc / static_cast<double>(M);
    r.value_db = detail::saturating_db(r.value_linear);
    return r;
}

/// Eve-side SDNR on the unrecovered mix: aggregate energies with a 1/(Q*M)
/// prefactor.
inline SdnrReport sdnr_eve(const CVec &enc, const CVec &enc_dynamic, const CsiTensor &reference,
                           double sigma) {
    const std::size_t M = reference.num_packets();
    const std::size_t Q = reference.num_antennas();
    if (enc.size() != M || enc_dynamic.size() != M)
        throw std::invalid_argument("sdnr_eve: series length mismatch");
    const CVec ref = detail::reference_mix(reference.clean);
    const CVec ref_static = detail::reference_mix(reference.static_part);
    SdnrReport r;
    r.num_packets = M;
    for (std::size_t m = 0; m < M; ++m) {
        r.dynamic_energy += std::norm(enc_dynamic[m]);
        r.distortion_energy += std::norm(enc[m] - ref[m]);
        r.static_energy += std::norm(ref_static[m]);
    }
    r.noise_energy = sigma * sigma;
    const double den = r.distortion_energy + r.static_energy + r.noise_energy;
    const double scale = 1.0 / (static_cast<double>(Q) * static_cast<double>(M));
    r.value_linear = den > 0.0 ? scale * r.dynamic_energy / den
                               : (r.dynamic_energy > 0.0 ? kSaturatedLinear : 0.0);
    r.value_db = detail::saturating_db(r.value_linear);
    return r;
}

/// Bob-side SDNR on the keyed recovery. The distortion term is the recovery
/// residual against the clean per-antenna reference.
inline SdnrReport sdnr_bob(const CMat &recovered, const CsiTensor &reference, double sigma) {
    const std::size_t M = reference.num_packets();
    const std::size_t Q = reference.num_antennas();
    if (recovered.rows() != Q || recovered.cols() != M)
        throw std::invalid_argument("sdnr_bob: recovered shape mismatch");
    SdnrReport r;
    r.num_packets = M;
    for (std::size_t q = 0; q < Q; ++q) {
        for (std::size_t m = 0; m < M; ++m) {
            r.dynamic_energy += std::norm(reference.dynamic_part(q, m));
            r.distortion_energy += std::norm(recovered(q, m) - reference.clean(q, m));
            r.static_energy += std::norm(reference.static_part(q, m));
        }
    }
    r.noise_energy = sigma * sigma;
    const double den = r.distortion_energy + r.static_energy + r.noise_energy;
    const double scale = 1.0 / (static_cast<double>(Q) * static_cast<double>(M));
    r.value_linear = den > 0.0 ? scale * r.dynamic_energy / den
                               : (r.dynamic_energy > 0.0 ? kSaturatedLinear : 0.0);
    r.value_db = detail::saturating_db(r.value_linear);
    return r;
}

struct CommSnr {
    double linear = 0.0;
    double db = 0.0;
};

/// Per-packet average communication SNR  ||enc||^2 / (M sigma^2).
inline CommSnr comm_snr(const EncryptedCsiSeries &enc, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("comm_snr: sigma must be > 0");
    const double e = energy(enc.values);
    CommSnr out;
    out.linear = e / (static_cast<double>(enc.size()) * sigma * sigma);
    out.db = detail::saturating_db(out.linear);
    return out;
}

/// Cosine similarity of the two magnitude envelopes.
inline double envelope_similarity(const CVec &a, const CVec &b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("envelope_similarity: need equal non-empty lengths");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ma = std::abs(a[i]);
        const double mb = std::abs(b[i]);
        dot += ma * mb;
        na += ma * ma;
        nb += mb * mb;
    }
    if (na <= 0.0 || nb <= 0.0)
        throw std::domain_error("envelope_similarity: undefined for zero-magnitude series");
    return dot / std::sqrt(na * nb);
}

inline TaskScore score_task(const std::vector<int> &predictions, const std::vector<int> &labels) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("score_task: length mismatch");
    TaskScore s;
    s.total = labels.size();
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (predictions[i] == labels[i]) ++s.correct;
    s.accuracy = s.total > 0 ? static_cast<double>(s.correct) / static_cast<double>(s.total) : 0.0;
    return s;
}

inline TaskScore score_bits(const std::vector<std::uint8_t> &tx_bits,
                            const std::vector<std::uint8_t> &rx_bits) {
    if (tx_bits.size() != rx_bits.size()) throw std::invalid_argument("score_bits: length mismatch");
    TaskScore s;
    s.total_bits = tx_bits.size();
    for (std::size_t i = 0; i < tx_bits.size(); ++i)
        if (tx_bits[i] != rx_bits[i]) ++s.error_bits;
    s.ber = s.total_bits > 0 ? static_cast<double>(s.error_bits) / static_cast<double>(s.total_bits)
                             : 0.0;
    return s;
}

} // namespace mimocloak
