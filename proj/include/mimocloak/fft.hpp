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

#include <stdexcept>

#include "mimocloak/common.hpp"

namespace mimocloak {

/// In-place iterative radix-2 DIT FFT. Length must be a power of two.
/// Forward transform uses the e^{-j2pi k n / N} convention, no scaling.
inline void fft_inplace(CVec &x, bool inverse = false) {
    const std::size_t n = x.size();
    if (n == 0) return;
    if ((n & (n - 1)) != 0)
        throw std::invalid_argument("fft_inplace: length must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = x[i + k];
                cplx v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n);
        for (auto &z : x) z *= s;
    }
}

inline CVec fft(CVec x) {
    fft_inplace(x, false);
    return x;
}

inline CVec ifft(CVec x) {
    fft_inplace(x, true);
    return x;
}

/// Rotate so the zero-frequency bin sits at index n/2 (even n).
inline CVec fftshift(const CVec &x) {
    const std::size_t n = x.size();
    CVec y(n);
    const std::size_t h = n / 2;
    for (std::size_t i = 0; i < n; ++i) y[i] = x[(i + h) % n];
    return y;
}

} // namespace mimocloak
