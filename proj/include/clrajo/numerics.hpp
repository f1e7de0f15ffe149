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

#ifndef CLRAJO_NUMERICS_HPP
#define CLRAJO_NUMERICS_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace clrajo {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Every stochastic routine takes an explicit generator; nothing is global.
using Rng = std::mt19937_64;

// Shape mismatch, empty input, or an index outside the admissible range.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Out-of-domain scalar parameter (negative variance, nonpositive distance, ...).
class ParameterError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
// non-increasing and eigenvectors in matching column order.
struct EigenPair {
    RVector values;
    CMatrix vectors;
};

// First `cols` columns of the unitary rows x rows DFT matrix,
// entry (m, n) = exp(-j 2 pi m n / rows) / sqrt(rows).
CMatrix dft_matrix(std::size_t rows, std::size_t cols);

// The input is symmetrized as (A + A^H) / 2 before factoring. Ties in the
// eigenvalues keep their original (ascending-solver) index order.
EigenPair hermitian_eig_desc(const CMatrix &a);

// Moore-Penrose inverse via SVD; singular values below rel_tol * sigma_max
// are treated as zero.
CMatrix pseudo_inverse(const CMatrix &a, double rel_tol = 1e-12);

CMatrix kron(const CMatrix &a, const CMatrix &b);

// i.i.d. CN(0, variance) entries: real and imaginary parts N(0, variance / 2).
CMatrix complex_gaussian(Rng &rng, std::size_t rows, std::size_t cols, double variance);

// Number of singular values above rel_tol * sigma_max.
std::size_t numerical_rank(const CMatrix &a, double rel_tol = 1e-8);

bool all_finite(const CMatrix &a);

// Throws ParameterError naming `what` when `a` holds NaN or Inf.
void require_finite(const CMatrix &a, const std::string &what);

} // namespace clrajo

#endif
