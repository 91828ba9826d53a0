// Copyright 2026 The qrom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent dense reference transforms and solvers. Nothing here calls
// into the rest of the library.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace qrom::oracle {

using cd = std::complex<double>;

// F_jk = e^{2 pi i jk / N} / sqrt(N).
inline Eigen::MatrixXcd dft(std::size_t n) {
    Eigen::MatrixXcd f(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
            f(j, k) = std::polar(s, ang);
        }
    }
    return f;
}

// Orthonormal DCT-II basis: column k holds c_k cos(pi (2i+1) k / 2N) over i.
inline Eigen::MatrixXd dct2(std::size_t n) {
    Eigen::MatrixXd c(n, n);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ck = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
        for (std::size_t i = 0; i < n; ++i) {
            c(i, k) = ck * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * nn));
        }
    }
    return c;
}

inline Eigen::MatrixXd dct1(std::size_t n) {
    Eigen::MatrixXd c(n, n);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            c(i, k) = std::cos(std::numbers::pi * static_cast<double>(i * k) / (nn - 1.0));
        }
        c.col(k).normalize();
    }
    return c;
}

inline Eigen::MatrixXd dct3(std::size_t n) { return dct2(n).transpose(); }

inline Eigen::MatrixXd dct4(std::size_t n) {
    Eigen::MatrixXd c(n, n);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            c(i, k) = std::sqrt(2.0 / nn) * std::cos(std::numbers::pi * (2.0 * i + 1.0) * (2.0 * k + 1.0) / (4.0 * nn));
        }
    }
    return c;
}

// Gauss-Jordan inverse with partial pivoting, written out by hand.
inline Eigen::MatrixXcd gauss_jordan_inverse(Eigen::MatrixXcd a) {
    const auto n = a.rows();
    Eigen::MatrixXcd inv = Eigen::MatrixXcd::Identity(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index piv = col;
        for (Eigen::Index r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            std::swap(a(col, k), a(piv, k));
            std::swap(inv(col, k), inv(piv, k));
        }
        const cd d = a(col, col);
        for (Eigen::Index k = 0; k < n; ++k) {
            a(col, k) /= d;
            inv(col, k) /= d;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == col) continue;
            const cd f = a(r, col);
            for (Eigen::Index k = 0; k < n; ++k) {
                a(r, k) -= f * a(col, k);
                inv(r, k) -= f * inv(col, k);
            }
        }
    }
    return inv;
}

inline std::vector<cd> random_complex(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cd> v(n);
    for (auto& x : v) x = cd(g(rng), g(rng));
    return v;
}

inline std::vector<cd> random_unit(std::size_t n, std::mt19937_64& rng) {
    auto v = random_complex(n, rng);
    double s = 0.0;
    for (auto& x : v) s += std::norm(x);
    s = std::sqrt(s);
    for (auto& x : v) x /= s;
    return v;
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qrom::oracle
