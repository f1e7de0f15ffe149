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

#include "clrajo/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clrajo {

namespace {

constexpr double kEigenFloor = 1e-300;

void check_rows(const std::vector<CMatrix> &m_rows, const SystemConfig &cfg, std::size_t row_blocks)
{
    if (m_rows.empty())
        throw DimensionError("estimator: no row observations");
    const auto rows = static_cast<Eigen::Index>(cfg.rf_chains * row_blocks);
    for (const CMatrix &m : m_rows)
        if (m.rows() != rows || m.cols() != static_cast<Eigen::Index>(cfg.N()))
            throw DimensionError("estimator: row observation is " + std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                                 std::to_string(cfg.N()));
}

EstimatorOutput start_output(const SubspaceEstimate &subspace)
{
    EstimatorOutput out;
    out.rank_hat = subspace.rank;
    out.S_hat = subspace.basis;
    out.mdl_rank = subspace.mdl_rank;
    out.rank_clamped = subspace.rank_clamped;
    out.mdl_degenerate = subspace.mdl_degenerate;
    return out;
}

} // namespace

MdlResult mdl_rank(const RVector &eigenvalues, std::size_t sample_count)
{
    const auto M = static_cast<std::size_t>(eigenvalues.size());
    if (M == 0)
        throw DimensionError("mdl_rank: no eigenvalues");
    if (sample_count < 2)
        throw ParameterError("mdl_rank: sample_count must be at least 2");

    MdlResult result;
    if (!(eigenvalues.maxCoeff() > 0.0))
    {
        result.degenerate = true;
        return result;
    }

    const double S = static_cast<double>(sample_count);
    const double logS = std::log(S);

    // Suffix sums over i >= n of lambda_i and log(lambda_i).
    std::vector<double> tail_sum(M + 1, 0.0), tail_log(M + 1, 0.0);
    for (std::size_t i = M; i-- > 0;)
    {
        const double v = std::max(eigenvalues(static_cast<Eigen::Index>(i)), kEigenFloor);
        tail_sum[i] = tail_sum[i + 1] + v;
        tail_log[i] = tail_log[i + 1] + std::log(v);
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n + 1 <= M; ++n)
    {
        const double count = static_cast<double>(M - n);
        const double log_geo = tail_log[n] / count;
        const double log_ari = std::log(tail_sum[n] / count);
        const double likelihood = -count * S * (log_geo - log_ari);
        const double penalty = 0.5 * static_cast<double>(n) * static_cast<double>(2 * M - n) * logS;
        const double objective = likelihood + penalty;
        if (objective < best)
        {
            best = objective;
            result.rank = n;
        }
    }
    return result;
}

CMatrix estimate_column_space(const CMatrix &m_col, std::size_t rank)
{
    if (rank == 0 || rank > static_cast<std::size_t>(m_col.rows()))
        throw ParameterError("estimate_column_space: rank " + std::to_string(rank) + " outside [1, " +
                             std::to_string(m_col.rows()) + "]");
    const EigenPair eig = hermitian_eig_desc(m_col * m_col.adjoint());
    return eig.vectors.leftCols(static_cast<Eigen::Index>(rank));
}

SubspaceEstimate estimate_subspace(const CMatrix &m_col, std::size_t max_rank, double eig_zero_tol)
{
    if (m_col.size() == 0)
        throw DimensionError("estimate_subspace: empty column observations");
    if (max_rank == 0)
        throw ParameterError("estimate_subspace: max_rank must be positive");

    const EigenPair eig = hermitian_eig_desc(m_col * m_col.adjoint());
    RVector lambda = eig.values;
    const double cutoff = eig_zero_tol * std::max(lambda(0), 0.0);
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (lambda(i) < cutoff)
            lambda(i) = 0.0;

    const MdlResult mdl = mdl_rank(lambda, static_cast<std::size_t>(m_col.cols()));

    SubspaceEstimate est;
    est.mdl_rank = mdl.rank;
    est.mdl_degenerate = mdl.degenerate;
    est.rank = std::min(mdl.rank, max_rank);
    est.rank_clamped = est.rank != mdl.rank;
    est.basis = eig.vectors.leftCols(static_cast<Eigen::Index>(est.rank));
    est.eigenvalues = eig.values;
    return est;
}

CMatrix row_sampling_matrix(const SystemConfig &cfg, std::size_t row_blocks)
{
    return dft_matrix(cfg.M(), cfg.rf_chains * row_blocks);
}

std::vector<CMatrix> ls_coefficients(const CMatrix &S_hat, const std::vector<CMatrix> &m_rows,
                                     const SystemConfig &cfg, std::size_t row_blocks, double pinv_tol)
{
    if (S_hat.rows() != static_cast<Eigen::Index>(cfg.M()) || S_hat.cols() == 0)
        throw DimensionError("ls_coefficients: S_hat must be M x r with r >= 1");
    const auto rank = static_cast<std::size_t>(S_hat.cols());
    const std::size_t rows = cfg.rf_chains * row_blocks;
    if (rows < rank)
        throw ParameterError("ls_coefficients: N_RF B_r = " + std::to_string(rows) + " is below the rank " +
                             std::to_string(rank) + "; increase B_r");

    const CMatrix P = row_sampling_matrix(cfg, row_blocks).adjoint() * S_hat;
    if (numerical_rank(P, 1e-10) < rank)
        throw ParameterError("ls_coefficients: P = Phi^H S_hat is rank deficient; increase B_r");
    const CMatrix P_pinv = pseudo_inverse(P, pinv_tol);

    std::vector<CMatrix> out;
    out.reserve(m_rows.size());
    for (const CMatrix &m : m_rows)
    {
        if (m.rows() != P.rows())
            throw DimensionError("ls_coefficients: row observation has " + std::to_string(m.rows()) +
                                 " rows, expected " + std::to_string(P.rows()));
        out.emplace_back(P_pinv * m);
    }
    return out;
}

CMatrix ls_coefficients(const CMatrix &S_hat, const CMatrix &m_row, const SystemConfig &cfg,
                        std::size_t row_blocks, double pinv_tol)
{
    return ls_coefficients(S_hat, std::vector<CMatrix>{m_row}, cfg, row_blocks, pinv_tol).front();
}

DiagonalUpdate update_D(const CMatrix &T_prev, const CMatrix &T_LS)
{
    if (T_prev.rows() != T_LS.rows() || T_prev.cols() != T_LS.cols())
        throw DimensionError("update_D: shape mismatch");

    DiagonalUpdate out;
    out.d = CVector::Zero(T_prev.cols());
    for (Eigen::Index n = 0; n < T_prev.cols(); ++n)
    {
        const double energy = T_prev.col(n).squaredNorm();
        if (!(energy > 0.0))
        {
            ++out.degenerate_columns;
            continue;
        }
        // Eigen's dot() conjugates its first argument.
        out.d(n) = T_prev.col(n).dot(T_LS.col(n)) / energy;
    }
    return out;
}

CMatrix update_T(const std::vector<CMatrix> &T_LS, const std::vector<CVector> &D)
{
    if (T_LS.empty() || T_LS.size() != D.size())
        throw DimensionError("update_T: need one diagonal per coefficient matrix");
    const Eigen::Index r = T_LS.front().rows();
    const Eigen::Index N = T_LS.front().cols();

    CMatrix numerator = CMatrix::Zero(r, N);
    RVector denominator = RVector::Zero(N);
    for (std::size_t i = 0; i < T_LS.size(); ++i)
    {
        if (T_LS[i].rows() != r || T_LS[i].cols() != N || D[i].size() != N)
            throw DimensionError("update_T: shape mismatch");
        numerator.noalias() += T_LS[i] * D[i].conjugate().asDiagonal();
        denominator += D[i].cwiseAbs2();
    }

    CMatrix T(r, N);
    for (Eigen::Index n = 0; n < N; ++n)
        T.col(n) = denominator(n) > 0.0 ? CVector(numerator.col(n) / denominator(n)) : CVector::Zero(r);
    return T;
}

double joint_objective(const CMatrix &T, const std::vector<CMatrix> &T_LS, const std::vector<CVector> &D)
{
    double loss = 0.0;
    for (std::size_t i = 0; i < T_LS.size(); ++i)
        loss += (T_LS[i] - T * D.at(i).asDiagonal()).squaredNorm();
    return loss;
}

EstimatorOutput clra_jo(const SubspaceEstimate &subspace, const std::vector<CMatrix> &m_rows,
                        const SystemConfig &cfg, const EstimatorOptions &opts)
{
    check_rows(m_rows, cfg, opts.row_blocks);
    EstimatorOutput out = start_output(subspace);

    const std::vector<CMatrix> T_LS = ls_coefficients(subspace.basis, m_rows, cfg, opts.row_blocks, opts.pinv_tol);
    const std::size_t count = T_LS.size();
    const Eigen::Index N = T_LS.front().cols();

    CMatrix T = T_LS.front();
    std::vector<CVector> D(count, CVector::Ones(N));
    out.loss_trajectory.push_back(joint_objective(T, T_LS, D));

    for (std::size_t t = 0; t < opts.t_max; ++t)
    {
        for (std::size_t i = 1; i < count; ++i)
        {
            DiagonalUpdate upd = update_D(T, T_LS[i]);
            out.degenerate_d_columns += upd.degenerate_columns;
            D[i] = std::move(upd.d);
        }
        T = update_T(T_LS, D);
        out.loss_trajectory.push_back(joint_objective(T, T_LS, D));
    }

    out.T_hat = T;
    out.D_hat = D;
    out.H_eff_hat.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        if (opts.t_max == 0)
            out.H_eff_hat.emplace_back(subspace.basis * T_LS[i]);
        else
            out.H_eff_hat.emplace_back(subspace.basis * T * D[i].asDiagonal());
    }
    return out;
}

EstimatorOutput clra_ls(const SubspaceEstimate &subspace, const std::vector<CMatrix> &m_rows,
                        const SystemConfig &cfg, const EstimatorOptions &opts)
{
    check_rows(m_rows, cfg, opts.row_blocks);
    EstimatorOutput out = start_output(subspace);

    const std::vector<CMatrix> T_LS = ls_coefficients(subspace.basis, m_rows, cfg, opts.row_blocks, opts.pinv_tol);
    out.T_hat = T_LS.front();
    out.D_hat.assign(T_LS.size(), CVector::Ones(T_LS.front().cols()));
    out.H_eff_hat.reserve(T_LS.size());
    for (const CMatrix &t : T_LS)
        out.H_eff_hat.emplace_back(subspace.basis * t);
    return out;
}

EstimatorOutput clra_jo(const ObservationSet &obs, const SystemConfig &cfg, const EstimatorOptions &opts)
{
    const SubspaceEstimate sub = estimate_subspace(obs.m_col, cfg.rf_chains * opts.row_blocks, opts.eig_zero_tol);
    return clra_jo(sub, obs.m_row, cfg, opts);
}

EstimatorOutput clra_ls(const ObservationSet &obs, const SystemConfig &cfg, const EstimatorOptions &opts)
{
    const SubspaceEstimate sub = estimate_subspace(obs.m_col, cfg.rf_chains * opts.row_blocks, opts.eig_zero_tol);
    return clra_ls(sub, obs.m_row, cfg, opts);
}

ComplexityReport complexity_estimate(std::uint64_t M, std::uint64_t N, std::uint64_t K, std::uint64_t L,
                                     std::uint64_t rank, std::uint64_t t_max)
{
    ComplexityReport c;
    c.ls = N * rank * rank * K * L;
    c.d_update = N * (3 * rank + 1) * K * L;
    c.t_update = N * (rank + 2) * K * L;
    c.total = M * M * M + c.ls + t_max * (c.d_update + c.t_update);
    return c;
}

MatrixArchive to_archive(const EstimatorOutput &out)
{
    MatrixArchive a;
    a.kind = "estimator_output";
    a.add_scalar("rank_hat", static_cast<double>(out.rank_hat));
    a.add_scalar("mdl_rank", static_cast<double>(out.mdl_rank));
    a.add_scalar("rank_clamped", out.rank_clamped ? 1.0 : 0.0);
    a.add_scalar("mdl_degenerate", out.mdl_degenerate ? 1.0 : 0.0);
    a.add_scalar("degenerate_d_columns", static_cast<double>(out.degenerate_d_columns));
    a.add_scalar("count", static_cast<double>(out.H_eff_hat.size()));
    a.add("S_hat", out.S_hat);
    a.add("T_hat", out.T_hat);
    CMatrix loss(static_cast<Eigen::Index>(out.loss_trajectory.size()), 1);
    for (std::size_t i = 0; i < out.loss_trajectory.size(); ++i)
        loss(static_cast<Eigen::Index>(i), 0) = out.loss_trajectory[i];
    a.add("loss_trajectory", loss);
    for (std::size_t i = 0; i < out.H_eff_hat.size(); ++i)
    {
        a.add("D_hat/" + std::to_string(i), out.D_hat.at(i));
        a.add("H_eff_hat/" + std::to_string(i), out.H_eff_hat[i]);
    }
    return a;
}

EstimatorOutput estimator_output_from_archive(const MatrixArchive &a)
{
    if (a.kind != "estimator_output")
        throw std::runtime_error("archive kind '" + a.kind + "' is not an estimator output");
    EstimatorOutput out;
    out.rank_hat = static_cast<std::size_t>(a.get_scalar("rank_hat"));
    out.mdl_rank = static_cast<std::size_t>(a.get_scalar("mdl_rank"));
    out.rank_clamped = a.get_scalar("rank_clamped") != 0.0;
    out.mdl_degenerate = a.get_scalar("mdl_degenerate") != 0.0;
    out.degenerate_d_columns = static_cast<std::size_t>(a.get_scalar("degenerate_d_columns"));
    out.S_hat = a.get("S_hat");
    out.T_hat = a.get("T_hat");
    const CMatrix &loss = a.get("loss_trajectory");
    for (Eigen::Index i = 0; i < loss.rows(); ++i)
        out.loss_trajectory.push_back(loss(i, 0).real());
    const auto count = static_cast<std::size_t>(a.get_scalar("count"));
    for (std::size_t i = 0; i < count; ++i)
    {
        out.D_hat.emplace_back(a.get("D_hat/" + std::to_string(i)).col(0));
        out.H_eff_hat.push_back(a.get("H_eff_hat/" + std::to_string(i)));
    }
    return out;
}

} // namespace clrajo
