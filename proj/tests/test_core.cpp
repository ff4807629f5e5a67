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

#include "mimocloak/fft.hpp"
#include "mimocloak/rng.hpp"
#include "mimocloak/sha512.hpp"

using namespace mimocloak;

TEST_CASE("sha512 matches FIPS 180-2 vectors") {
    auto hex_of = [](const std::string &msg) {
        return Sha512::hex(Sha512::hash(msg.data(), msg.size()));
    };
    CHECK(hex_of("abc") ==
          "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
          "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f");
    CHECK(hex_of("") ==
          "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce"
          "47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e");
    CHECK(hex_of("abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmn"
                 "hijklmnoijklmnopjklmnopqklmnopqrlmnopqrsmnopqrstnopqrstu") ==
          "8e959b75dae313da8cf4f72814fc143f8f7779c6eb9f7fa17299aeadb6889018"
          "501d289e4900f7e4331b99dec4b5433ac7d329eeb6dd26545e96e55b874be909");
}

TEST_CASE("sha512 streaming equals one-shot across block boundaries") {
    std::string msg(300, 'x');
    for (std::size_t i = 0; i < msg.size(); ++i) msg[i] = static_cast<char>('a' + (i % 23));
    auto ref = Sha512::hash(msg.data(), msg.size());
    for (std::size_t split : {1u, 63u, 64u, 127u, 128u, 129u, 255u}) {
        Sha512 h;
        h.update(msg.data(), split);
        h.update(msg.data() + split, msg.size() - split);
        CHECK(h.finish() == ref);
    }
}

TEST_CASE("rng determinism and stream independence") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        double x = a.uniform();
        all_equal = all_equal && (x == b.uniform());
        any_diff = any_diff || (x != c.uniform());
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
    }
    CHECK(all_equal);
    CHECK(any_diff);
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
    CHECK(derive_seed(7, 1, 2) != derive_seed(7, 2, 1));
}

TEST_CASE("rng normal moments and complex noise energy") {
    Rng rng(7);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sum2 += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);

    double e = 0.0;
    for (int i = 0; i < n; ++i) e += std::norm(rng.complex_normal(0.3));
    CHECK(std::abs(e / n - 0.09) < 0.002);
}

namespace {

// quadratic-time reference transform
CVec dft_naive(const CVec &x) {
    const std::size_t n = x.size();
    CVec out(n, cplx(0, 0));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            double ang = -2.0 * kPi * static_cast<double>(k * j) / static_cast<double>(n);
            out[k] += x[j] * cplx(std::cos(ang), std::sin(ang));
        }
    return out;
}

} // namespace

TEST_CASE("fft agrees with the naive DFT oracle") {
    Rng rng(11);
    for (std::size_t n : {8u, 64u, 256u}) {
        CVec x(n);
        for (auto &z : x) z = cplx(rng.normal(), rng.normal());
        auto fast = fft(x);
        auto slow = dft_naive(x);
        double max_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) max_err = std::max(max_err, std::abs(fast[i] - slow[i]));
        CHECK(max_err < 1e-9 * static_cast<double>(n));

        auto back = ifft(fast);
        double rt_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) rt_err = std::max(rt_err, std::abs(back[i] - x[i]));
        CHECK(rt_err < 1e-12 * static_cast<double>(n));
    }
    CHECK_THROWS_AS(fft(CVec(3)), std::invalid_argument);
}

TEST_CASE("fftshift centers the zero bin") {
    CVec x(8, cplx(0, 0));
    x[0] = cplx(1, 0); // DC only -> flat spectrum; shift moves bin 0 to index 4
    CVec idx(8);
    for (std::size_t i = 0; i < 8; ++i) idx[i] = cplx(static_cast<double>(i), 0);
    auto s = fftshift(idx);
    CHECK(s[4] == cplx(0, 0));
    CHECK(s[0] == cplx(4, 0));
    CHECK(s[7] == cplx(3, 0));
}
