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

#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimocloak {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

// dB sentinel used when a ratio's denominator vanishes; keeps downstream
// optimization objectives finite.
inline constexpr double kSaturatedDb = 300.0;
inline constexpr double kSaturatedLinear = 1e30;

inline double lin_to_db(double x) { return 10.0 * std::log10(x); }
inline double db_to_lin(double x) { return std::pow(10.0, x / 10.0); }

/// Dense row-major complex matrix indexed [antenna q][packet m].
class CMat {
  public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols, cplx fill = cplx(0.0, 0.0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    cplx &operator()(std::size_t q, std::size_t m) { return data_[q * cols_ + m]; }
    const cplx &operator()(std::size_t q, std::size_t m) const { return data_[q * cols_ + m]; }

    cplx *data() { return data_.data(); }
    const cplx *data() const { return data_.data(); }

    std::vector<cplx> &raw() { return data_; }
    const std::vector<cplx> &raw() const { return data_; }

    /// One antenna's packet series as a copy.
    CVec row(std::size_t q) const {
        return CVec(data_.begin() + static_cast<std::ptrdiff_t>(q * cols_),
                    data_.begin() + static_cast<std::ptrdiff_t>((q + 1) * cols_));
    }

    bool same_shape(const CMat &o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const CMat &a, const CMat &b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline double energy(const CVec &v) {
    double e = 0.0;
    for (const auto &z : v) e += std::norm(z);
    return e;
}

inline double energy(const CMat &m) {
    double e = 0.0;
    for (const auto &z : m.raw()) e += std::norm(z);
    return e;
}

/// Shortest-round-trip decimal formatting; used everywhere numbers reach
/// text files so reruns stay byte-identical.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace mimocloak
