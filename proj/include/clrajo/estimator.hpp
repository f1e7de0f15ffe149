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

#ifndef CLRAJO_ESTIMATOR_HPP
#define CLRAJO_ESTIMATOR_HPP

#include "clrajo/archive.hpp"
#include "clrajo/channel.hpp"
#include "clrajo/numerics.hpp"
#include "clrajo/protocol.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace clrajo {

// Every effective channel factors as S_col T_[k,l] with S_col an orthonormal
// basis of range(F) and T_[k,l] = T_[1,1] D_[k,l], D_[k,l] diagonal. The
// estimator recovers S_col from the column-sampled observations (MDL model
// order + leading eigenvectors of M_col M_col^H), forms per-(k,l) least
// squares coefficients from the row-sampled observations, and then refines
// T_[1,1] and the diagonals by alternating least squares on
//
//   L(T, {D}) = sum_{k,l} || T_LS[k,l] - T D[k,l] ||_F^2,   D[1,1] = I.

struct EstimatorOptions {
    std::size_t t_max = 10;
    std::size_t row_blocks = 1;   // B_r, fixes the row-sampling combiner
    double pinv_tol = 1e-12;      // relative singular-value cutoff of P^dagger
    double eig_zero_tol = 1e-10;  // eigenvalues below this * lambda_max are zero
};

struct MdlResult {
    std::size_t rank = 1;
    bool degenerate = false; // all eigenvalues zero
};

struct SubspaceEstimate {
    std::size_t rank = 0;     // used rank, after clamping
    std::size_t mdl_rank = 0; // raw MDL choice
    bool rank_clamped = false;
    bool mdl_degenerate = false;
    CMatrix basis;            // M x rank, orthonormal columns
    RVector eigenvalues;      // of M_col M_col^H, descending
};

struct DiagonalUpdate {
    CVector d;
    std::size_t degenerate_columns = 0; // zero-norm columns of T_prev, d set to 0
};

struct EstimatorOutput {
    std::size_t rank_hat = 0;
    CMatrix S_hat;                  // M x rank_hat
    CMatrix T_hat;                  // rank_hat x N, the [1,1] coefficients
    std::vector<CVector> D_hat;     // K L diagonals of length N, D_hat[0] == 1
    std::vector<CMatrix> H_eff_hat; // K L matrices M x N, index k L + l
    std::vector<double> loss_trajectory; // t_max + 1 values for CLRA-JO, empty for CLRA-LS

    std::size_t mdl_rank = 0;
    bool rank_clamped = false;
    bool mdl_degenerate = false;
    std::size_t degenerate_d_columns = 0;
};

struct ComplexityReport {
    std::uint64_t ls = 0;
    std::uint64_t d_update = 0;
    std::uint64_t t_update = 0;
    std::uint64_t total = 0;
};

// argmin over n in [1, M-1] of
//   -(M-n) S log(geomean(l_{n+1..M}) / mean(l_{n+1..M})) + n (2M-n) log(S) / 2,
// with S = sample_count and eigenvalues floored at 1e-300. Smallest n wins ties.
MdlResult mdl_rank(const RVector &eigenvalues, std::size_t sample_count);

// Leading `rank` eigenvectors of M_col M_col^H.
CMatrix estimate_column_space(const CMatrix &m_col, std::size_t rank);

// MDL on the eigenvalues of M_col M_col^H (sample count = columns of M_col),
// then the leading eigenvectors. The rank is clamped to max_rank.
SubspaceEstimate estimate_subspace(const CMatrix &m_col, std::size_t max_rank, double eig_zero_tol = 1e-10);

// Phi_[M, N_RF B_r], the row-sampling combiner stack.
CMatrix row_sampling_matrix(const SystemConfig &cfg, std::size_t row_blocks);

// T_LS = P^dagger M_row with P = Phi_[M, N_RF B_r]^H S_hat. Throws
// ParameterError when P lacks full column rank (N_RF B_r < rank).
CMatrix ls_coefficients(const CMatrix &S_hat, const CMatrix &m_row, const SystemConfig &cfg,
                        std::size_t row_blocks, double pinv_tol = 1e-12);
std::vector<CMatrix> ls_coefficients(const CMatrix &S_hat, const std::vector<CMatrix> &m_rows,
                                     const SystemConfig &cfg, std::size_t row_blocks, double pinv_tol = 1e-12);

// Column-wise minimizer of || T_LS - T_prev diag(d) ||_F:
//   d_n = <T_prev(:, n), T_LS(:, n)> / ||T_prev(:, n)||^2.
DiagonalUpdate update_D(const CMatrix &T_prev, const CMatrix &T_LS);

// Minimizer over T of sum_i || T_LS[i] - T diag(D[i]) ||_F^2:
//   T = (sum_i T_LS[i] diag(D[i])^H) (sum_i diag(D[i]) diag(D[i])^H)^-1.
// Columns whose diagonal sum is zero are set to zero.
CMatrix update_T(const std::vector<CMatrix> &T_LS, const std::vector<CVector> &D);

double joint_objective(const CMatrix &T, const std::vector<CMatrix> &T_LS, const std::vector<CVector> &D);

EstimatorOutput clra_jo(const ObservationSet &obs, const SystemConfig &cfg, const EstimatorOptions &opts = {});
EstimatorOutput clra_ls(const ObservationSet &obs, const SystemConfig &cfg, const EstimatorOptions &opts = {});

// Second part only, reusing a subspace estimated earlier.
EstimatorOutput clra_jo(const SubspaceEstimate &subspace, const std::vector<CMatrix> &m_rows,
                        const SystemConfig &cfg, const EstimatorOptions &opts = {});
EstimatorOutput clra_ls(const SubspaceEstimate &subspace, const std::vector<CMatrix> &m_rows,
                        const SystemConfig &cfg, const EstimatorOptions &opts = {});

// Complex-multiplication counts of the estimator:
//   LS = N r^2 K L, D = N (3r + 1) K L, T = N (r + 2) K L,
//   total = M^3 + LS + t_max (D + T).
ComplexityReport complexity_estimate(std::uint64_t M, std::uint64_t N, std::uint64_t K, std::uint64_t L,
                                     std::uint64_t rank, std::uint64_t t_max);

MatrixArchive to_archive(const EstimatorOutput &out);
EstimatorOutput estimator_output_from_archive(const MatrixArchive &archive);

} // namespace clrajo

#endif
