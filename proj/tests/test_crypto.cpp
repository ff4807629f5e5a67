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

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "mimocloak/channel.hpp"
#include "mimocloak/crypto.hpp"

using namespace mimocloak;

namespace {

CsiTensor tensor_from(const CMat &clean, double sigma = 0.0) {
    CsiTensor csi;
    csi.clean = clean;
    csi.noisy = clean;
    csi.static_part = clean;
    csi.dynamic_part = CMat(clean.rows(), clean.cols());
    csi.schedule = regular_schedule(clean.cols(), 1e-3);
    csi.noise_std = sigma;
    return csi;
}

CMat random_cmat(std::size_t q, std::size_t m, std::uint64_t seed) {
    CMat out(q, m);
    Rng rng(seed);
    for (auto &z : out.raw()) z = cplx(rng.normal(), rng.normal());
    return out;
}

} // namespace

TEST_CASE("sample_psi honors the power budget") {
    SECTION("reference size saturates at M*Q") {
        auto psi = sample_psi(8, 1500, 42);
        CHECK(psi.coeffs.size() == 12000);
        CHECK(psi.power() == Catch::Approx(12000.0).margin(1e-6));
        CHECK(psi.satisfies_power());
        for (const auto &d : psi.coeffs.raw())
            CHECK(std::abs(d) == Catch::Approx(1.0).epsilon(1e-12));
    }
    SECTION("budget holds across magnitude ranges and seeds") {
        for (std::uint64_t seed : {1u, 2u, 9u}) {
            auto psi = sample_psi(4, 100, seed, 0.5, 2.0);
            CHECK(psi.satisfies_power());
        }
    }
    SECTION("two seeds differ almost everywhere") {
        auto a = sample_psi(8, 1500, 1);
        auto b = sample_psi(8, 1500, 2);
        std::size_t diff = 0;
        for (std::size_t i = 0; i < a.coeffs.size(); ++i)
            diff += a.coeffs.raw()[i] != b.coeffs.raw()[i];
        CHECK(static_cast<double>(diff) / static_cast<double>(a.coeffs.size()) > 0.99);
    }
    SECTION("empty magnitude range rejected") {
        CHECK_THROWS_AS(sample_psi(2, 4, 1, 1.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(sample_psi(2, 4, 1, 0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(sample_psi(0, 4, 1), std::invalid_argument);
    }
}

TEST_CASE("encrypt mixes antennas per packet") {
    auto h = random_cmat(2, 3, 5);
    auto csi = tensor_from(h);

    SECTION("single-antenna passthrough") {
        auto psi = make_passthrough_psi(2, 3);
        auto enc = encrypt(csi, psi);
        for (std::size_t m = 0; m < 3; ++m) CHECK(enc.values[m] == h(0, m));
    }
    SECTION("all-ones sums the antennas") {
        auto psi = make_allones_psi(2, 3);
        auto enc = encrypt(csi, psi);
        for (std::size_t m = 0; m < 3; ++m) CHECK(enc.values[m] == h(0, m) + h(1, m));
    }
    SECTION("random 2x3 case matches scalar arithmetic") {
        auto psi = sample_psi(2, 3, 17, 0.5, 1.5);
        auto enc = encrypt(csi, psi);
        for (std::size_t m = 0; m < 3; ++m) {
            const cplx expected = h(0, m) * psi.coeffs(0, m) + h(1, m) * psi.coeffs(1, m);
            CHECK(std::abs(enc.values[m] - expected) < 1e-15);
        }
    }
    SECTION("shape mismatch rejected") {
        auto psi = sample_psi(3, 3, 1);
        CHECK_THROWS_AS(encrypt(csi, psi), std::invalid_argument);
    }
}

TEST_CASE("encryption is linear in the channel") {
    auto psi = sample_psi(3, 16, 7, 0.5, 1.5);
    auto h1 = random_cmat(3, 16, 100);
    auto h2 = random_cmat(3, 16, 101);
    const cplx a(0.7, -0.2), b(-1.1, 0.4);
    CMat comb(3, 16);
    for (std::size_t i = 0; i < comb.size(); ++i)
        comb.raw()[i] = a * h1.raw()[i] + b * h2.raw()[i];
    auto e1 = encrypt_component(h1, psi);
    auto e2 = encrypt_component(h2, psi);
    auto ec = encrypt_component(comb, psi);
    for (std::size_t m = 0; m < 16; ++m)
        CHECK(std::abs(ec[m] - (a * e1[m] + b * e2[m])) < 1e-12);
}

TEST_CASE("randomize_schedule contracts") {
    SECTION("gamma zero gives the regular grid exactly") {
        auto s = randomize_schedule(100, 1e-3, 0.0, 5);
        for (std::size_t m = 0; m < 100; ++m)
            CHECK(s.timestamps[m] == static_cast<double>(m) * 1e-3);
        CHECK_FALSE(s.repaired);
    }
    SECTION("gamma 0.5 keeps the mean interval near the base") {
        auto s = randomize_schedule(1500, 1e-3, 0.5, 6);
        const double mean = (s.timestamps.back() - s.timestamps.front()) / 1499.0;
        CHECK(std::abs(mean - 1e-3) / 1e-3 < 0.02);
        CHECK(std::is_sorted(s.timestamps.begin(), s.timestamps.end()));
        for (double b : s.betas) CHECK(std::abs(b) <= 0.5 + 1e-12);
    }
    SECTION("gamma 0.9 repairs to strictly increasing") {
        auto s = randomize_schedule(2000, 1e-3, 0.9, 7);
        for (std::size_t m = 1; m < s.size(); ++m)
            CHECK(s.timestamps[m] > s.timestamps[m - 1]);
        for (double b : s.betas) CHECK(std::abs(b) <= 0.9 + 1e-9);
    }
    SECTION("out-of-range gamma rejected") {
        CHECK_THROWS_AS(randomize_schedule(10, 1e-3, -0.1, 1), std::invalid_argument);
        CHECK_THROWS_AS(randomize_schedule(10, 1e-3, 0.95, 1), std::invalid_argument);
    }
}

TEST_CASE("hash_key determinism, length, and avalanche") {
    auto psi = sample_psi(4, 64, 11);
    auto key = hash_key(psi);

    SECTION("identical matrices yield identical keys") {
        EncryptionMatrix copy = psi;
        CHECK(hash_key(copy) == key);
        CHECK(key.to_hex().size() == 512);
        CHECK(key.bits.size() * 8 == 2048);
    }
    SECTION("sign flips change at least 40 percent of bits") {
        Rng rng(3);
        double min_frac = 1.0, sum_frac = 0.0;
        const int flips = 100;
        for (int i = 0; i < flips; ++i) {
            EncryptionMatrix mod = psi;
            const std::size_t idx = static_cast<std::size_t>(rng.uniform_index(mod.coeffs.size()));
            mod.coeffs.raw()[idx] = -mod.coeffs.raw()[idx];
            const double frac =
                static_cast<double>(key_hamming_distance(key, hash_key(mod))) / 2048.0;
            min_frac = std::min(min_frac, frac);
            sum_frac += frac;
        }
        CHECK(min_frac >= 0.40);
        CHECK(sum_frac / flips > 0.45);
    }
}

TEST_CASE("block least-squares decryption") {
    const std::size_t Q = 4, M = 64, L = 16;

    SECTION("noiseless block-constant channels recover exactly") {
        for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
            auto psi = sample_psi(Q, M, seed);
            CMat truth(Q, M);
            Rng rng(derive_seed(seed, 5));
            for (std::size_t b = 0; b < M / L; ++b) {
                for (std::size_t q = 0; q < Q; ++q) {
                    const cplx v(rng.normal(), rng.normal());
                    for (std::size_t l = 0; l < L; ++l) truth(q, b * L + l) = v;
                }
            }
            EncryptedCsiSeries enc;
            enc.values = encrypt_component(truth, psi);
            enc.schedule = regular_schedule(M, 1e-3);
            auto res = decrypt_block_ls(enc, psi, L);
            REQUIRE(res.block_conds.size() == M / L);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < truth.size(); ++i) {
                num += std::norm(res.recovered.raw()[i] - truth.raw()[i]);
                den += std::norm(truth.raw()[i]);
            }
            CHECK(std::sqrt(num / den) < 1e-9);
        }
    }
    SECTION("constant coefficients in a block are rank deficient") {
        auto psi = make_allones_psi(Q, M);
        EncryptedCsiSeries enc;
        enc.values = CVec(M, cplx(1, 0));
        enc.schedule = regular_schedule(M, 1e-3);
        try {
            decrypt_block_ls(enc, psi, L);
            FAIL("expected SingularBlockError");
        } catch (const SingularBlockError &e) {
            CHECK(e.block_index() == 0);
        }
    }
    SECTION("underdetermined block length rejected") {
        auto psi = sample_psi(Q, M, 1);
        EncryptedCsiSeries enc;
        enc.values = CVec(M, cplx(1, 0));
        enc.schedule = regular_schedule(M, 1e-3);
        CHECK_THROWS_AS(decrypt_block_ls(enc, psi, Q - 1), std::invalid_argument);
    }
    SECTION("tail shorter than Q is flagged, tail >= Q is solved") {
        auto psi_long = sample_psi(Q, 70, 2); // 4 blocks of 16 + tail of 6 >= Q
        EncryptedCsiSeries enc;
        enc.values = CVec(70, cplx(1, 0));
        enc.schedule = regular_schedule(70, 1e-3);
        auto solved = decrypt_block_ls(enc, psi_long, 16);
        CHECK_FALSE(solved.tail_unsolved);
        CHECK(solved.block_conds.size() == 5);

        auto psi_tail = sample_psi(Q, 67, 2); // tail of 3 < Q
        enc.values = CVec(67, cplx(1, 0));
        enc.schedule = regular_schedule(67, 1e-3);
        auto flagged = decrypt_block_ls(enc, psi_tail, 16);
        CHECK(flagged.tail_unsolved);
        CHECK(flagged.tail_begin == 64);
    }
}

TEST_CASE("recovery error energy tracks pseudo-inverse noise amplification") {
    // Monte-Carlo regression: across scramblers of varying conditioning the
    // measured recovery error energy should correlate > 0.95 with
    // sigma^2 * tr((D^H D)^-1) summed over blocks.
    const std::size_t Q = 4, M = 32, L = 16;
    const double sigma = 0.05;
    std::vector<double> predicted, measured;
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
        // sweep the magnitude floor to spread block conditioning widely
        const double mag_lo = 0.03 + 0.9 * std::pow(static_cast<double>(trial) / 60.0, 2.0);
        auto psi = sample_psi(Q, M, derive_seed(900, trial), mag_lo, 1.0);
        CMat truth(Q, M);
        Rng rng(derive_seed(901, trial));
        for (std::size_t b = 0; b < M / L; ++b)
            for (std::size_t q = 0; q < Q; ++q) {
                const cplx v(rng.normal(), rng.normal());
                for (std::size_t l = 0; l < L; ++l) truth(q, b * L + l) = v;
            }
        auto clean = encrypt_component(truth, psi);

        // analytic amplification per block
        double pred = 0.0;
        for (std::size_t b = 0; b < M / L; ++b) {
            Eigen::MatrixXcd D(L, Q);
            for (std::size_t l = 0; l < L; ++l)
                for (std::size_t q = 0; q < Q; ++q)
                    D(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(q)) =
                        psi.coeffs(q, b * L + l);
            Eigen::MatrixXcd G = D.adjoint() * D;
            pred += G.inverse().trace().real();
        }
        pred *= sigma * sigma * static_cast<double>(L); // replicated across the block

        double err = 0.0;
        const int reps = 24;
        for (int rep = 0; rep < reps; ++rep) {
            EncryptedCsiSeries enc;
            enc.values = clean;
            Rng nrng(derive_seed(902, trial, static_cast<std::uint64_t>(rep)));
            for (auto &z : enc.values) z += nrng.complex_normal(sigma);
            enc.schedule = regular_schedule(M, 1e-3);
            auto res = decrypt_block_ls(enc, psi, L);
            for (std::size_t i = 0; i < truth.size(); ++i)
                err += std::norm(res.recovered.raw()[i] - truth.raw()[i]);
        }
        predicted.push_back(pred);
        measured.push_back(err / reps);
    }
    // Pearson correlation
    auto mean_of = [](const std::vector<double> &v) {
        double s = 0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const double mp = mean_of(predicted), mm = mean_of(measured);
    double num = 0, dp = 0, dm = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        num += (predicted[i] - mp) * (measured[i] - mm);
        dp += (predicted[i] - mp) * (predicted[i] - mp);
        dm += (measured[i] - mm) * (measured[i] - mm);
    }
    const double corr = num / std::sqrt(dp * dm);
    INFO("correlation " << corr);
    CHECK(corr > 0.95);
}

TEST_CASE("psi file format round trip") {
    auto psi = sample_psi(3, 17, 23, 0.5, 1.5);
    const auto path = std::filesystem::temp_directory_path() / "mimocloak_psi_test.bin";
    save_psi(psi, path.string());
    auto loaded = load_psi(path.string());
    CHECK(loaded.coeffs == psi.coeffs);
    CHECK(hash_key(loaded) == hash_key(psi));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_psi("/nonexistent/psi.bin"), std::runtime_error);
}

TEST_CASE("blend_with_unencrypted endpoints") {
    auto psi = sample_psi(2, 8, 3);
    auto plain = blend_with_unencrypted(psi, 0.0);
    for (const auto &d : plain.coeffs.raw()) CHECK(std::abs(d - cplx(1, 0)) < 1e-12);
    auto full = blend_with_unencrypted(psi, 1.0);
    for (std::size_t i = 0; i < psi.coeffs.size(); ++i)
        CHECK(std::abs(full.coeffs.raw()[i] - psi.coeffs.raw()[i]) < 1e-12);
    CHECK(full.satisfies_power());
    CHECK_THROWS_AS(blend_with_unencrypted(psi, 1.5), std::invalid_argument);
}
