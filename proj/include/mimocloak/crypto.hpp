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
// Spatial-temporal channel encryption. The scrambler is a Q x M array of
// complex coefficients d_{q,m} (the diagonal entries of per-antenna
// beamformer blocks); a receiver observes the in-air mix
//   enc_m = sum_q h_{q,m} d_{q,m}.
// Legitimate receivers holding the coefficients recover per-antenna channels
// by least squares over coherence blocks; everyone else sees a per-packet
// random remix.

#pragma once

#include <array>
#include <cstring>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "mimocloak/channel.hpp"
#include "mimocloak/common.hpp"
#include "mimocloak/rng.hpp"
#include "mimocloak/schedule.hpp"
#include "mimocloak/sha512.hpp"

namespace mimocloak {

/// Q x M scrambling coefficients plus the total power budget
/// sum |d|^2 <= power_budget (defaults to M * Q).
struct EncryptionMatrix {
    CMat coeffs;
    double power_budget = 0.0;

    std::size_t num_antennas() const { return coeffs.rows(); }
    std::size_t num_packets() const { return coeffs.cols(); }

    double power() const { return energy(coeffs); }

    bool satisfies_power(double slack = 1e-9) const {
        return power() <= power_budget * (1.0 + slack);
    }
};

/// Scales the coefficients down onto the power ball when they exceed the
/// budget; a feasible matrix is returned unchanged.
inline EncryptionMatrix project_to_power_budget(EncryptionMatrix psi) {
    const double p = psi.power();
    if (p > psi.power_budget && p > 0.0) {
        const double s = std::sqrt(psi.power_budget / p);
        for (auto &d : psi.coeffs.raw()) d *= s;
    }
    return psi;
}

/// Coefficients with uniform phase and magnitude uniform in
/// [mag_lo, mag_hi], rescaled onto the power ball if the draw exceeds it.
/// The default unit-modulus range saturates the budget exactly.
inline EncryptionMatrix sample_psi(std::size_t num_antennas, std::size_t num_packets,
                                   std::uint64_t rng_seed, double mag_lo = 1.0,
                                   double mag_hi = 1.0) {
    if (num_antennas < 1 || num_packets < 1)
        throw std::invalid_argument("sample_psi: Q and M must be >= 1");
    if (!(mag_lo > 0.0) || mag_hi < mag_lo)
        throw std::invalid_argument("sample_psi: empty magnitude range");
    EncryptionMatrix psi;
    psi.coeffs = CMat(num_antennas, num_packets);
    psi.power_budget = static_cast<double>(num_antennas) * static_cast<double>(num_packets);
    Rng rng(rng_seed);
    for (std::size_t q = 0; q < num_antennas; ++q) {
        for (std::size_t m = 0; m < num_packets; ++m) {
            const double mag = mag_lo == mag_hi ? mag_lo : rng.uniform(mag_lo, mag_hi);
            psi.coeffs(q, m) = mag * rng.unit_phase();
        }
    }
    return project_to_power_budget(std::move(psi));
}

/// Single-antenna passthrough: d_{1,m} = 1, all other antennas muted.
inline EncryptionMatrix make_passthrough_psi(std::size_t num_antennas, std::size_t num_packets) {
    EncryptionMatrix psi;
    psi.coeffs = CMat(num_antennas, num_packets);
    psi.power_budget = static_cast<double>(num_antennas) * static_cast<double>(num_packets);
    for (std::size_t m = 0; m < num_packets; ++m) psi.coeffs(0, m) = cplx(1.0, 0.0);
    return psi;
}

/// All antennas transmitting unscrambled (d = 1 everywhere).
inline EncryptionMatrix make_allones_psi(std::size_t num_antennas, std::size_t num_packets) {
    EncryptionMatrix psi;
    psi.coeffs = CMat(num_antennas, num_packets, cplx(1.0, 0.0));
    psi.power_budget = static_cast<double>(num_antennas) * static_cast<double>(num_packets);
    return psi;
}

/// Interpolates between the unscrambled all-ones matrix (strength 0) and the
/// given matrix (strength 1); used by sweeps that need graded scrambling.
inline EncryptionMatrix blend_with_unencrypted(const EncryptionMatrix &psi, double strength) {
    if (strength < 0.0 || strength > 1.0)
        throw std::invalid_argument("blend_with_unencrypted: strength must lie in [0, 1]");
    EncryptionMatrix out = psi;
    for (auto &d : out.coeffs.raw()) d = (1.0 - strength) * cplx(1.0, 0.0) + strength * d;
    return project_to_power_budget(std::move(out));
}

/// CSI series observed at a single Rx antenna after in-air mixing.
struct EncryptedCsiSeries {
    CVec values;
    TemporalSchedule schedule;

    std::size_t size() const { return values.size(); }
};

/// Low-level mix of an arbitrary Q x M component (clean, dynamic, ...) —
/// encryption is linear, so parts can be scrambled independently.
inline CVec encrypt_component(const CMat &h, const EncryptionMatrix &psi) {
    if (!h.same_shape(psi.coeffs))
        throw std::invalid_argument("encrypt_component: CSI and psi shapes differ");
    const std::size_t Q = h.rows();
    const std::size_t M = h.cols();
    CVec out(M, cplx(0.0, 0.0));
    for (std::size_t q = 0; q < Q; ++q)
        for (std::size_t m = 0; m < M; ++m) out[m] += h(q, m) * psi.coeffs(q, m);
    return out;
}

/// The in-air spatial mix of the receiver-side observation (csi.noisy).
inline EncryptedCsiSeries encrypt(const CsiTensor &csi, const EncryptionMatrix &psi) {
    if (csi.num_antennas() != psi.num_antennas() || csi.num_packets() != psi.num_packets())
        throw std::invalid_argument("encrypt: CSI and psi must agree on Q and M");
    EncryptedCsiSeries enc;
    enc.values = encrypt_component(csi.noisy, psi);
    enc.schedule = csi.schedule;
    return enc;
}

// ---------------------------------------------------------------------------
// Key derivation
// ---------------------------------------------------------------------------

/// 2048-bit key hashed from an encryption matrix.
struct KeyPhi {
    std::array<std::uint8_t, 256> bits{};
    std::string source_digest_alg = "sha512-ctr4";

    std::string to_hex() const {
        static const char *k = "0123456789abcdef";
        std::string s;
        s.reserve(512);
        for (std::uint8_t b : bits) {
            s.push_back(k[b >> 4]);
            s.push_back(k[b & 0xf]);
        }
        return s;
    }

    bool bit(std::size_t i) const { return (bits[i >> 3] >> (7 - (i & 7))) & 1; }

    friend bool operator==(const KeyPhi &a, const KeyPhi &b) { return a.bits == b.bits; }
};

inline std::size_t key_hamming_distance(const KeyPhi &a, const KeyPhi &b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        std::uint8_t x = static_cast<std::uint8_t>(a.bits[i] ^ b.bits[i]);
        while (x) {
            d += x & 1;
            x >>= 1;
        }
    }
    return d;
}

namespace detail {

inline void append_le_double(std::vector<std::uint8_t> &out, double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof(u));
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
}

} // namespace detail

/// Canonical byte serialization: row-major [q][m] pairs of IEEE-754 binary64
/// (real, imag), little-endian. Keys derived from it are portable.
inline std::vector<std::uint8_t> canonical_serialization(const EncryptionMatrix &psi) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(psi.coeffs.size() * 16);
    for (std::size_t q = 0; q < psi.num_antennas(); ++q) {
        for (std::size_t m = 0; m < psi.num_packets(); ++m) {
            detail::append_le_double(bytes, psi.coeffs(q, m).real());
            detail::append_le_double(bytes, psi.coeffs(q, m).imag());
        }
    }
    return bytes;
}

/// Concatenation of four SHA-512 digests of (serialization || counter byte)
/// for counters 0..3 — 2048 bits total, deterministic per matrix.
inline KeyPhi hash_key(const EncryptionMatrix &psi) {
    const auto ser = canonical_serialization(psi);
    KeyPhi key;
    for (std::uint8_t counter = 0; counter < 4; ++counter) {
        Sha512 h;
        h.update(ser.data(), ser.size());
        h.update(&counter, 1);
        const auto digest = h.finish();
        std::memcpy(key.bits.data() + static_cast<std::size_t>(counter) * 64, digest.data(), 64);
    }
    return key;
}

// ---------------------------------------------------------------------------
// Block least-squares decryption
// ---------------------------------------------------------------------------

class SingularBlockError : public std::runtime_error {
  public:
    SingularBlockError(std::size_t block_index, double cond)
        : std::runtime_error("decrypt_block_ls: rank-deficient design matrix in block " +
                             std::to_string(block_index) +
                             " (condition number " + fmt_g17(cond) + ")"),
          block_index_(block_index), condition_number_(cond) {}

    std::size_t block_index() const { return block_index_; }
    double condition_number() const { return condition_number_; }

  private:
    std::size_t block_index_;
    double condition_number_;
};

struct BlockLsResult {
    CMat recovered;                          // Q x M, block solutions replicated
    std::vector<double> block_conds;         // condition number per solved block
    std::vector<std::size_t> block_begins;   // first packet index per solved block
    bool tail_unsolved = false;              // trailing packets shorter than Q
    std::size_t tail_begin = 0;
};

inline constexpr double kSingularConditionLimit = 1e12;

/// Recovers per-antenna channels under a block-constant channel model: within
/// each block of L packets, enc_m = sum_q h_q d_{q,m} with h_q constant, an
/// L x Q least-squares system in the known coefficients. The residue left by
/// noise scales with the squared pseudo-inverse norm of each block's design
/// matrix, which is why conditioning is reported (and optimized elsewhere).
/// A trailing partial block is still solved when it has at least Q packets;
/// a shorter tail is filled from the last solution and flagged.
inline BlockLsResult decrypt_block_ls(const EncryptedCsiSeries &enc, const EncryptionMatrix &psi,
                                      std::size_t block_len) {
    const std::size_t Q = psi.num_antennas();
    const std::size_t M = psi.num_packets();
    if (enc.size() != M)
        throw std::invalid_argument("decrypt_block_ls: series length must match psi");
    if (block_len < Q)
        throw std::invalid_argument(
            "decrypt_block_ls: underdetermined — block length must be >= antenna count");

    BlockLsResult res;
    res.recovered = CMat(Q, M);

    std::size_t m0 = 0;
    std::size_t block_index = 0;
    Eigen::VectorXcd last_solution = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(Q));
    bool have_solution = false;
    while (m0 < M) {
        const std::size_t len = std::min(block_len, M - m0);
        if (len < Q) {
            res.tail_unsolved = true;
            res.tail_begin = m0;
            for (std::size_t q = 0; q < Q; ++q)
                for (std::size_t m = m0; m < M; ++m)
                    res.recovered(q, m) =
                        have_solution ? last_solution(static_cast<Eigen::Index>(q)) : cplx(0, 0);
            break;
        }
        Eigen::MatrixXcd D(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(Q));
        Eigen::VectorXcd b(static_cast<Eigen::Index>(len));
        for (std::size_t l = 0; l < len; ++l) {
            for (std::size_t q = 0; q < Q; ++q)
                D(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(q)) =
                    psi.coeffs(q, m0 + l);
            b(static_cast<Eigen::Index>(l)) = enc.values[m0 + l];
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto &sv = svd.singularValues();
        const double smax = sv(0);
        const double smin = sv(sv.size() - 1);
        const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
        if (!(cond <= kSingularConditionLimit)) throw SingularBlockError(block_index, cond);
        last_solution = svd.solve(b);
        have_solution = true;
        res.block_conds.push_back(cond);
        res.block_begins.push_back(m0);
        for (std::size_t q = 0; q < Q; ++q)
            for (std::size_t l = 0; l < len; ++l)
                res.recovered(q, m0 + l) = last_solution(static_cast<Eigen::Index>(q));
        m0 += len;
        ++block_index;
    }
    return res;
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

inline constexpr char kPsiMagic[6] = {'M', 'C', 'P', 'S', 'I', '1'};

inline void save_psi(const EncryptionMatrix &psi, const std::string &path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_psi: cannot open " + path);
    os.write(kPsiMagic, 6);
    const auto put_u32 = [&os](std::uint32_t v) {
        std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                             static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
        os.write(reinterpret_cast<const char *>(b), 4);
    };
    put_u32(static_cast<std::uint32_t>(psi.num_antennas()));
    put_u32(static_cast<std::uint32_t>(psi.num_packets()));
    const auto ser = canonical_serialization(psi);
    os.write(reinterpret_cast<const char *>(ser.data()), static_cast<std::streamsize>(ser.size()));
    if (!os) throw std::runtime_error("save_psi: write failed for " + path);
}

inline EncryptionMatrix load_psi(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_psi: cannot open " + path);
    char magic[6];
    is.read(magic, 6);
    if (!is || std::memcmp(magic, kPsiMagic, 6) != 0)
        throw std::runtime_error("load_psi: bad magic in " + path);
    const auto get_u32 = [&is]() {
        std::uint8_t b[4];
        is.read(reinterpret_cast<char *>(b), 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    };
    const std::uint32_t Q = get_u32();
    const std::uint32_t M = get_u32();
    EncryptionMatrix psi;
    psi.coeffs = CMat(Q, M);
    psi.power_budget = static_cast<double>(Q) * static_cast<double>(M);
    for (std::size_t q = 0; q < Q; ++q) {
        for (std::size_t m = 0; m < M; ++m) {
            std::uint8_t raw[16];
            is.read(reinterpret_cast<char *>(raw), 16);
            if (!is) throw std::runtime_error("load_psi: truncated file " + path);
            auto read_le = [&raw](int off) {
                std::uint64_t u = 0;
                for (int b = 7; b >= 0; --b) u = (u << 8) | raw[off + b];
                double x;
                std::memcpy(&x, &u, sizeof(x));
                return x;
            };
            psi.coeffs(q, m) = cplx(read_le(0), read_le(8));
        }
    }
    return psi;
}

} // namespace mimocloak
