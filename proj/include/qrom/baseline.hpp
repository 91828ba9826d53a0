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

/**
 * @file baseline.hpp
 * @brief Classical tensor-product Chebyshev fitting on the same regularized
 *        normal equations as the quantum projection.
 *
 * Grid coordinates are cell centers, x_r = -1 + (2r + 1)/H on rows and
 * y_c = -1 + (2c + 1)/W on columns. Column k holds T_p(x_r) T_q(y_c) for the
 * k-th (p, q) of the chosen ordering, flattened row-major. Columns are raw
 * polynomial values, not orthonormalized.
 */
#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "qrom/data.hpp"
#include "qrom/opqnn.hpp"
#include "qrom/projection.hpp"

namespace qrom::baseline {

struct ChebBasis {
    int height = 0;
    int width = 0;
    opqnn::Ordering ordering = opqnn::Ordering::diagonal;
    std::vector<double> x;  ///< row coordinates
    std::vector<double> y;  ///< column coordinates
    std::vector<std::pair<int, int>> degrees;
    Eigen::MatrixXd columns;  ///< (H * W) x m

    [[nodiscard]] std::size_t m() const noexcept { return degrees.size(); }
};

/// T_0..T_{degree} at t by the three-term recurrence.
[[nodiscard]] std::vector<double> chebyshev_values(double t, int degree);

/// Throws DomainError unless 1 <= m <= H * W.
[[nodiscard]] ChebBasis cheb_basis(int height, int width, std::size_t m,
                                   opqnn::Ordering ordering = opqnn::Ordering::diagonal);

struct ChebFit {
    Eigen::VectorXd coefficients;  ///< against the unit-norm field
    double fidelity = 0.0;
    double residual = 0.0;
    std::vector<double> reconstruction;  ///< in the field's own units
};

/// Tikhonov fit of the normalized field; fidelity |<psi|normalize(A x)>|^2.
/// Throws DegenerateFieldError on a zero field and propagates solver errors.
[[nodiscard]] ChebFit cheb_fit(const data::FlowField& field, std::size_t m, double lambda = projection::kDefaultLambda,
                               opqnn::Ordering ordering = opqnn::Ordering::diagonal);
/// Same, reusing a prebuilt basis of matching shape.
[[nodiscard]] ChebFit cheb_fit(const data::FlowField& field, const ChebBasis& basis,
                               double lambda = projection::kDefaultLambda);

}  // namespace qrom::baseline
