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


#include "clrajo/archive.hpp"
#include "clrajo/channel.hpp"
#include "clrajo/protocol.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace clrajo;

namespace {

SystemConfig small_config()
{
    SystemConfig c;
    c.bs = {4, 2};
    c.ris = {4, 2};
    c.ue = {1, 2};
    c.users = 2;
    c.rf_chains = 4;
    c.paths_bsris = 2;
    c.paths_risuser = {2};
    return c;
}

std::vector<CMatrix> z_of(const std::vector<SubframeObservation> &obs)
{
    std::vector<CMatrix> out;
    for (const auto &o : obs)
        out.push_back(o.z);
    return out;
}

} // namespace

TEST_CASE("pilots are orthogonal with X X^H = P T I")
{
    const PilotSet one = build_pilots(1, 1, 1, 2.5);
    REQUIRE(one.X.size() == 1);
    CHECK(std::abs(one.X[0](0, 0) - std::sqrt(2.5)) < 1e-15);

    const PilotSet p = build_pilots(2, 2, 4, 3.0);
    CMatrix stack(4, 4);
    stack << p.X[0], p.X[1];
    const CMatrix gram = stack * stack.adjoint();
    CHECK((gram - 12.0 * CMatrix::Identity(4, 4)).norm() < 1e-10);
    for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(stack.row(i).squaredNorm() == doctest::Approx(4.0 * 3.0));

    const PilotSet longer = build_pilots(3, 2, 9, 1.0);
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t q = 0; q < 3; ++q)
        {
            const CMatrix g = longer.X[k] * longer.X[q].adjoint();
            if (k == q)
                CHECK((g - 9.0 * CMatrix::Identity(2, 2)).norm() < 1e-10);
            else
                CHECK(g.norm() < 1e-10);
        }
    CHECK_THROWS_AS(build_pilots(2, 2, 3, 1.0), ParameterError);
}

TEST_CASE("first-phase schedule")
{
    SystemConfig c = small_config();
    const auto first = schedule_first_phase(c, 2);
    CHECK(first.size() == 4); // M_RF B_c = 2 * 2

    const CMatrix dft = dft_matrix(8, 8);
    for (std::size_t b = 0; b < 2; ++b)
    {
        CMatrix stacked(8, 8);
        stacked << first[2 * b].combiner, first[2 * b + 1].combiner;
        CHECK((stacked - dft).norm() < 1e-15);
        CHECK((first[2 * b].reflection - first[2 * b + 1].reflection).norm() == 0.0);
        const CVector expected = std::sqrt(8.0) * dft_matrix(8, 2).col(static_cast<Eigen::Index>(b));
        CHECK((first[2 * b].reflection - expected).norm() < 1e-14);
    }
    for (const Subframe &s : first)
        for (Eigen::Index n = 0; n < s.reflection.size(); ++n)
            CHECK(std::abs(std::abs(s.reflection(n)) - 1.0) < 1e-14);

    const auto single = schedule_first_phase(c, 1);
    for (const Subframe &s : single)
        CHECK((s.reflection - single.front().reflection).norm() == 0.0);
    CHECK_THROWS_AS(schedule_first_phase(c, 9), ParameterError);
    CHECK_THROWS_AS(schedule_first_phase(c, 0), ParameterError);
}

TEST_CASE("second-phase schedule")
{
    SystemConfig c = small_config();
    c.rf_chains = 2;
    const auto one = schedule_second_phase(c, 1);
    CHECK(one.size() == 8);
    CMatrix V(8, 8);
    for (std::size_t i = 0; i < one.size(); ++i)
    {
        CHECK((one[i].combiner - one[0].combiner).norm() == 0.0);
        V.col(static_cast<Eigen::Index>(i)) = one[i].reflection;
    }
    CHECK((V * V.adjoint() - 8.0 * CMatrix::Identity(8, 8)).norm() < 1e-12);

    const auto two = schedule_second_phase(c, 2);
    CHECK(two.size() == 16);
    const CMatrix phi = dft_matrix(8, 4);
    CHECK((two[0].combiner - phi.leftCols(2)).norm() < 1e-15);
    CHECK((two[8].combiner - phi.rightCols(2)).norm() < 1e-15);
    CHECK_THROWS_AS(schedule_second_phase(c, 5), ParameterError);
}

TEST_CASE("schedule totals and overhead")
{
    SystemConfig c;
    const ProtocolSchedule s = build_schedule(c, 6, 1);
    CHECK(s.total_subframes() == 8 * 6 + 32);
    CHECK(training_overhead(c, 6, 1) == s.total_subframes());
    CHECK(s.pilots.length == 16);
    CHECK(build_schedule(c, 3, 2, 20).pilots.length == 20);
    CHECK(build_schedule(c, 3, 2).total_subframes() == 8 * 3 + 2 * 32);
    // 128 x 128 reference sizes
    SystemConfig xl;
    xl.bs = xl.ris = {16, 8};
    xl.rf_chains = 8;
    CHECK(training_overhead(xl, 10, 1) == 16 * 10 + 128);
}

TEST_CASE("noiseless subframe equals C^H F diag(v) H_k")
{
    SystemConfig c = small_config();
    c.noise_variance = 0.0;
    Rng rng(3);
    const ChannelRealization real = generate_realization(rng, c);
    const ProtocolSchedule sched = build_schedule(c, 2, 1);
    const Subframe &sf = sched.first_phase[1];
    const SubframeObservation o = simulate_subframe(real, sf, sched.pilots, 0.0, rng);
    REQUIRE(o.z.rows() == 4);
    REQUIRE(o.z.cols() == 4);
    for (std::size_t k = 0; k < 2; ++k)
    {
        const CMatrix expected = sf.combiner.adjoint() * real.F * sf.reflection.asDiagonal() * real.H[k];
        CHECK((o.z.middleCols(static_cast<Eigen::Index>(2 * k), 2) - expected).norm() <= 1e-12 * expected.norm());
    }
    CHECK(o.noise.norm() == 0.0);
}

TEST_CASE("orthogonal pilots isolate the users")
{
    SystemConfig c = small_config();
    Rng rng(5);
    ChannelRealization real = generate_realization(rng, c);
    const ProtocolSchedule sched = build_schedule(c, 1, 1);
    const Subframe &sf = sched.second_phase[3];
    const CMatrix before = simulate_subframe(real, sf, sched.pilots, 0.0, rng).z.leftCols(2);
    real.H[1] *= 7.0;
    real.H[1](0, 0) += cdouble(3.0, -1.0);
    const CMatrix after = simulate_subframe(real, sf, sched.pilots, 0.0, rng).z.leftCols(2);
    CHECK((before - after).norm() < 1e-10);
}

TEST_CASE("effective noise variance is sigma^2 / (P T)")
{
    SystemConfig c;
    c.noise_variance = 2.0;
    c.transmit_power = 0.5;
    Rng rng(7);
    const ChannelRealization real = generate_realization(rng, c);
    const ProtocolSchedule sched = build_schedule(c, 6, 1, 20);
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t j = 0; n < 10000; ++j)
    {
        const SubframeObservation o =
            simulate_subframe(real, sched.second_phase[j % sched.second_phase.size()], sched.pilots, 2.0, rng);
        acc += o.noise.squaredNorm();
        n += static_cast<std::size_t>(o.noise.size());
    }
    CHECK(acc / static_cast<double>(n) == doctest::Approx(2.0 / (0.5 * 20.0)).epsilon(0.05));
}

TEST_CASE("noiseless column observations span range(F)")
{
    SystemConfig c;
    c.noise_variance = 0.0;
    Rng rng(9);
    const ChannelRealization real = generate_realization(rng, c);
    const ProtocolSchedule sched = build_schedule(c, 6, 1);
    const ObservationSet obs = observe(real, sched, c, rng);
    CHECK(obs.m_col.rows() == 32);
    CHECK(obs.m_col.cols() == 6 * 16);
    CHECK(obs.sample_count == 96);

    Eigen::JacobiSVD<CMatrix> svd(real.F, Eigen::ComputeThinU);
    const CMatrix S = svd.matrixU().leftCols(3);
    const CMatrix resid = obs.m_col - S * (S.adjoint() * obs.m_col);
    CHECK(resid.norm() < 1e-8 * obs.m_col.norm());
    CHECK(numerical_rank(obs.m_col) == numerical_rank(real.F));

    // dense oracle: block b equals F diag(v_b) [H_1 ... H_K]
    CMatrix Hs(32, 16);
    for (std::size_t k = 0; k < 4; ++k)
        Hs.middleCols(static_cast<Eigen::Index>(4 * k), 4) = real.H[k];
    for (std::size_t b = 0; b < 6; ++b)
    {
        const CVector v = sched.first_phase[8 * b].reflection;
        const CMatrix expected = real.F * v.asDiagonal() * Hs;
        CHECK((obs.m_col.middleCols(static_cast<Eigen::Index>(16 * b), 16) - expected).norm() <
              1e-10 * expected.norm());
    }
}

TEST_CASE("noiseless row observations equal Phi^H H_eff")
{
    SystemConfig c = small_config();
    c.noise_variance = 0.0;
    c.rf_chains = 2;
    Rng rng(10);
    const ChannelRealization real = generate_realization(rng, c);
    for (std::size_t br : {1u, 2u})
    {
        const ProtocolSchedule sched = build_schedule(c, 2, br);
        const ObservationSet obs = observe(real, sched, c, rng);
        const CMatrix phi = dft_matrix(8, 2 * br);
        REQUIRE(obs.m_row.size() == 4);
        for (std::size_t i = 0; i < 4; ++i)
        {
            CHECK(obs.m_row[i].rows() == static_cast<Eigen::Index>(2 * br));
            CHECK(obs.m_row[i].cols() == 8);
            const CMatrix expected = phi.adjoint() * real.H_eff[i];
            CHECK((obs.m_row[i] - expected).norm() < 1e-10 * expected.norm());
        }
    }
}

TEST_CASE("assembly validates subframe counts")
{
    SystemConfig c = small_config();
    std::vector<CMatrix> three(3, CMatrix::Zero(4, 4));
    CHECK_THROWS_AS(assemble_col_observations(three, c, 2), DimensionError);
    CHECK_THROWS_AS(assemble_row_observations(three, c, 1), DimensionError);

    SystemConfig shape = c;
    shape.bs = {1, 1};
    shape.rf_chains = 1;
    shape.users = 1;
    shape.ue = {1, 1};
    shape.noise_variance = 0.0;
    Rng rng(1);
    const ChannelRealization r = generate_realization(rng, shape);
    const ObservationSet o = observe(r, build_schedule(shape, 1, 1), shape, rng);
    CHECK(o.m_col.rows() == 1);
    CHECK(o.m_col.cols() == 1);
}

TEST_CASE("observe is deterministic and observe_rows skips part one")
{
    SystemConfig c;
    Rng a(44), b(44);
    const ChannelRealization ra = generate_realization(a, c);
    const ChannelRealization rb = generate_realization(b, c);
    const ProtocolSchedule s = build_schedule(c, 6, 1);
    const ObservationSet oa = observe(ra, s, c, a);
    const ObservationSet ob = observe(rb, s, c, b);
    CHECK((oa.m_col - ob.m_col).norm() == 0.0);
    CHECK((oa.m_row[5] - ob.m_row[5]).norm() == 0.0);

    const ObservationSet rows = observe_rows(ra, s, c, a);
    CHECK(rows.m_col.size() == 0);
    CHECK(rows.m_row.size() == 16);
    // noise bookkeeping: m_row - noise = noiseless rows
    const CMatrix phi = dft_matrix(32, 4);
    CHECK((rows.m_row[3] - rows.row_noise[3] - phi.adjoint() * ra.H_eff[3]).norm() < 1e-10 * rows.m_row[3].norm());
}

TEST_CASE("observation archive round trip")
{
    SystemConfig c;
    Rng rng(2);
    const ChannelRealization r = generate_realization(rng, c);
    const ObservationSet o = observe(r, build_schedule(c, 6, 1), c, rng);
    std::stringstream ss;
    write_archive(ss, to_archive(o));
    const ObservationSet back = observations_from_archive(read_archive(ss));
    CHECK((back.m_col - o.m_col).norm() == 0.0);
    REQUIRE(back.m_row.size() == o.m_row.size());
    for (std::size_t i = 0; i < o.m_row.size(); ++i)
        CHECK((back.m_row[i] - o.m_row[i]).norm() == 0.0);
    CHECK(back.sample_count == o.sample_count);
    CHECK(back.col_blocks == 6);
    CHECK(back.row_blocks == 1);
}
