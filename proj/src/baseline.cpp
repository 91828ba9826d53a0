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

#include "qrom/baseline.hpp"

#include <string>

#include "qrom/errors.hpp"
#include "qrom/recon.hpp"

namespace qrom::baseline {

std::vector<double> chebyshev_values(double t, int degree) {
    if (degree < 0) throw DomainError("negative Chebyshev degree");
    std::vector<double> out(static_cast<std::size_t>(degree) + 1);
    out[0] = 1.0;
    if (degree >= 1) out[1] = t;
    for (int k = 2; k <= degree; ++k) out[k] = 2.0 * t * out[k - 1] - out[k - 2];
    return out;
}

ChebBasis cheb_basis(int height, int width, std::size_t m, opqnn::Ordering ordering) {
    if (height < 1 || width < 1) throw DomainError("Chebyshev grid must be nonempty");
    const auto dim = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    if (m < 1 || m > dim) {
        throw DomainError("Chebyshev order " + std::to_string(m) + " outside [1, " + std::to_string(dim) + "]");
    }
    ChebBasis b;
    b.height = height;
    b.width = width;
    b.ordering = ordering;
    for (int r = 0; r < height; ++r) b.x.push_back(-1.0 + (2.0 * r + 1.0) / height);
    for (int c = 0; c < width; ++c) b.y.push_back(-1.0 + (2.0 * c + 1.0) / width);

    if (ordering == opqnn::Ordering::diagonal) {
        for (const auto& [p, q] : opqnn::diagonal_pairs(m, static_cast<std::uint64_t>(height),
                                                        static_cast<std::uint64_t>(width))) {
            b.degrees.emplace_back(static_cast<int>(p), static_cast<int>(q));
        }
    } else {
        for (std::size_t k = 0; k < m; ++k) {
            b.degrees.emplace_back(static_cast<int>(k / width), static_cast<int>(k % width));
        }
    }
    int max_p = 0;
    int max_q = 0;
    for (const auto& [p, q] : b.degrees) {
        max_p = std::max(max_p, p);
        max_q = std::max(max_q, q);
    }
    std::vector<std::vector<double>> tx;
    std::vector<std::vector<double>> ty;
    for (double x : b.x) tx.push_back(chebyshev_values(x, max_p));
    for (double y : b.y) ty.push_back(chebyshev_values(y, max_q));

    b.columns.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        const auto [p, q] = b.degrees[k];
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                b.columns(static_cast<Eigen::Index>(r) * width + c, static_cast<Eigen::Index>(k)) =
                    tx[r][p] * ty[c][q];
            }
        }
    }
    return b;
}

ChebFit cheb_fit(const data::FlowField& field, const ChebBasis& basis, double lambda) {
    data::validate(field);
    if (field.height != basis.height || field.width != basis.width) {
        throw ShapeError("field shape does not match the Chebyshev grid");
    }
    const Eigen::Map<const Eigen::VectorXd> f(field.values.data(), static_cast<Eigen::Index>(field.values.size()));
    const double norm = f.norm();
    if (!(norm > data::kMinFieldNorm)) throw DegenerateFieldError("cannot fit a zero field");

    const Eigen::MatrixXcd a = basis.columns.cast<std::complex<double>>();
    const Eigen::VectorXcd psi = (f / norm).cast<std::complex<double>>();
    const auto proj = projection::project(a, std::span<const std::complex<double>>(psi.data(), psi.size()), lambda,
                                          projection::InnerProduct::sesquilinear);
    ChebFit out;
    out.coefficients = proj.coefficients.x.real();
    out.residual = proj.coefficients.residual;
    out.fidelity = recon::direct_fidelity(std::span<const std::complex<double>>(psi.data(), psi.size()), a,
                                          proj.coefficients.x);
    const Eigen::VectorXd rec = norm * (basis.columns * out.coefficients);
    out.reconstruction.assign(rec.data(), rec.data() + rec.size());
    return out;
}

ChebFit cheb_fit(const data::FlowField& field, std::size_t m, double lambda, opqnn::Ordering ordering) {
    return cheb_fit(field, cheb_basis(field.height, field.width, m, ordering), lambda);
}

}  // namespace qrom::baseline
