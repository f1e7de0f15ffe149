// SPDX-License-Identifier: Apache-2.0
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

#include "clrajo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace clrajo {

CMatrix dft_matrix(std::size_t rows, std::size_t cols)
{
    if (rows == 0 || cols == 0)
        throw DimensionError("dft_matrix: dimensions must be positive");
    if (cols > rows)
        throw DimensionError("dft_matrix: cols (" + std::to_string(cols) + ") exceeds rows (" +
                             std::to_string(rows) + ")");

    const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
    CMatrix phi(rows, cols);
    for (std::size_t n = 0; n < cols; ++n)
        for (std::size_t m = 0; m < rows; ++m)
        {
            // Reduce m*n modulo rows first so the phase argument stays small.
            const auto k = static_cast<double>((m * n) % rows);
            const double angle = -2.0 * std::numbers::pi * k / static_cast<double>(rows);
            phi(m, n) = std::polar(scale, angle);
        }
    return phi;
}

EigenPair hermitian_eig_desc(const CMatrix &a)
{
    if (a.rows() != a.cols())
        throw DimensionError("hermitian_eig_desc: matrix is " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + ", expected square");
    if (a.size() == 0)
        throw DimensionError("hermitian_eig_desc: empty matrix");
    require_finite(a, "hermitian_eig_desc input");

    const CMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig_desc: eigen solver failed to converge");

    const RVector &asc = solver.eigenvalues();
    const auto n = static_cast<std::size_t>(asc.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return asc(i) > asc(j); });

    EigenPair out;
    out.values.resize(asc.size());
    out.vectors.resize(a.rows(), a.cols());
    for (std::size_t i = 0; i < n; ++i)
    {
        out.values(i) = asc(order[i]);
        out.vectors.col(i) = solver.eigenvectors().col(order[i]);
    }
    return out;
}

CMatrix pseudo_inverse(const CMatrix &a, double rel_tol)
{
    if (a.size() == 0)
        throw DimensionError("pseudo_inverse: empty matrix");
    if (!(rel_tol > 0.0))
        throw ParameterError("pseudo_inverse: rel_tol must be positive");
    require_finite(a, "pseudo_inverse input");

    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector &s = svd.singularValues();
    const double cutoff = rel_tol * (s.size() > 0 ? s(0) : 0.0);

    RVector inv_s = RVector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff && s(i) > 0.0)
            inv_s(i) = 1.0 / s(i);

    return svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().adjoint();
}

CMatrix kron(const CMatrix &a, const CMatrix &b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix complex_gaussian(Rng &rng, std::size_t rows, std::size_t cols, double variance)
{
    if (!(variance >= 0.0))
        throw ParameterError("complex_gaussian: variance must be nonnegative");

    CMatrix out = CMatrix::Zero(rows, cols);
    if (variance == 0.0)
        return out;

    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    // Column-major fill, real part drawn before imaginary part.
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r)
        {
            const double re = normal(rng);
            const double im = normal(rng);
            out(r, c) = cdouble(re, im);
        }
    return out;
}

std::size_t numerical_rank(const CMatrix &a, double rel_tol)
{
    if (a.size() == 0)
        return 0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    const RVector &s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0)
        return 0;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0))
            ++r;
    return r;
}

bool all_finite(const CMatrix &a)
{
    return a.allFinite();
}

void require_finite(const CMatrix &a, const std::string &what)
{
    if (!a.allFinite())
        throw ParameterError(what + ": non-finite entry");
}

} // namespace clrajo
