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

#include <doctest.h>

#include <cmath>

using namespace clrajo;

namespace {

double fro(const CMatrix &a)
{
    return a.norm();
}

CMatrix eye(Eigen::Index n)
{
    return CMatrix::Identity(n, n);
}

} // namespace

TEST_CASE("dft_matrix small cases")
{
    const CMatrix one = dft_matrix(1, 1);
    REQUIRE(one.rows() == 1);
    CHECK(std::abs(one(0, 0) - cdouble(1.0, 0.0)) < 1e-15);

    const CMatrix two = dft_matrix(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(two(0, 0) - s) < 1e-15);
    CHECK(std::abs(two(0, 1) - s) < 1e-15);
    CHECK(std::abs(two(1, 0) - s) < 1e-15);
    CHECK(std::abs(two(1, 1) + s) < 1e-15);
}

TEST_CASE("dft_matrix columns are orthonormal and the square case is unitary")
{
    const CMatrix phi = dft_matrix(8, 3);
    CHECK(phi.rows() == 8);
    CHECK(phi.cols() == 3);
    CHECK(fro(phi.adjoint() * phi - eye(3)) < 1e-12);

    for (std::size_t r : {1u, 4u, 7u, 32u, 128u})
    {
        const CMatrix u = dft_matrix(r, r);
        CHECK(fro(u * u.adjoint() - eye(static_cast<Eigen::Index>(r))) < 1e-12);
    }
}

TEST_CASE("dft_matrix entries follow exp(-j 2 pi m n / rows)")
{
    const std::size_t rows = 12;
    const CMatrix phi = dft_matrix(rows, 5);
    for (Eigen::Index m = 0; m < phi.rows(); ++m)
        for (Eigen::Index n = 0; n < phi.cols(); ++n)
        {
            const double ang = -2.0 * M_PI * static_cast<double>(m * n) / static_cast<double>(rows);
            CHECK(std::abs(phi(m, n) - std::polar(1.0 / std::sqrt(12.0), ang)) < 1e-14);
        }
}

TEST_CASE("dft_matrix rejects bad shapes")
{
    CHECK_THROWS_AS(dft_matrix(3, 4), DimensionError);
    CHECK_THROWS_AS(dft_matrix(0, 0), DimensionError);
    CHECK_THROWS_AS(dft_matrix(3, 0), DimensionError);
}

TEST_CASE("hermitian_eig_desc examples")
{
    const EigenPair id = hermitian_eig_desc(eye(3));
    CHECK((id.values - RVector::Ones(3)).norm() < 1e-12);
    CHECK(fro(id.vectors.adjoint() * id.vectors - eye(3)) < 1e-10);

    CMatrix d = CMatrix::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 4.0;
    d(2, 2) = 9.0;
    const EigenPair e = hermitian_eig_desc(d);
    CHECK(e.values(0) == doctest::Approx(9.0));
    CHECK(e.values(1) == doctest::Approx(4.0));
    CHECK(e.values(2) == doctest::Approx(1.0));

    Rng rng(3);
    const CMatrix b = complex_gaussian(rng, 5, 2, 1.0);
    const EigenPair lr = hermitian_eig_desc(b * b.adjoint());
    int above = 0;
    for (Eigen::Index i = 0; i < lr.values.size(); ++i)
        if (lr.values(i) > 1e-10)
            ++above;
    CHECK(above == 2);
}

TEST_CASE("hermitian_eig_desc reconstructs and sorts")
{
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        const CMatrix b = complex_gaussian(rng, 6, 6, 1.0);
        const CMatrix a = b + b.adjoint();
        const EigenPair e = hermitian_eig_desc(a);
        for (Eigen::Index i = 1; i < e.values.size(); ++i)
            CHECK(e.values(i - 1) >= e.values(i));
        const CMatrix rec = e.vectors * e.values.cast<cdouble>().asDiagonal() * e.vectors.adjoint();
        CHECK(fro(rec - a) <= 1e-8 * fro(a));
        CHECK(fro(e.vectors.adjoint() * e.vectors - eye(6)) < 1e-10);
    }
}

TEST_CASE("hermitian_eig_desc rejects non-square input")
{
    CHECK_THROWS_AS(hermitian_eig_desc(CMatrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("pseudo_inverse examples")
{
    CHECK(fro(pseudo_inverse(eye(4)) - eye(4)) < 1e-14);

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    const CMatrix di = pseudo_inverse(d);
    CHECK(std::abs(di(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(di(1, 1)) < 1e-15);

    Rng rng(5);
    const CMatrix a = complex_gaussian(rng, 6, 3, 1.0);
    CHECK(fro(pseudo_inverse(a) * a - eye(3)) < 1e-8);
}

TEST_CASE("pseudo_inverse satisfies the Moore-Penrose identities")
{
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial)
    {
        // rank-2 5x4 matrix
        const CMatrix a = complex_gaussian(rng, 5, 2, 1.0) * complex_gaussian(rng, 2, 4, 1.0);
        const CMatrix p = pseudo_inverse(a);
        const double tol = 1e-8 * fro(a);
        CHECK(fro(a * p * a - a) < tol);
        CHECK(fro(p * a * p - p) < 1e-8 * fro(p));
        CHECK(fro((a * p).adjoint() - a * p) < 1e-8);
        CHECK(fro((p * a).adjoint() - p * a) < 1e-8);
    }

    const CMatrix full = complex_gaussian(rng, 4, 4, 1.0);
    CHECK(fro(pseudo_inverse(pseudo_inverse(full)) - full) < 1e-8 * fro(full));
    CHECK_THROWS_AS(pseudo_inverse(CMatrix(0, 0)), DimensionError);
}

TEST_CASE("kron examples and structure")
{
    CMatrix five(1, 1);
    five(0, 0) = 5.0;
    const CMatrix k1 = kron(eye(2), five);
    CHECK(fro(k1 - 5.0 * eye(2)) < 1e-15);

    CMatrix a(1, 2), b(1, 2);
    a << 1.0, 2.0;
    b << 3.0, 4.0;
    const CMatrix k2 = kron(a, b);
    REQUIRE(k2.cols() == 4);
    CHECK(std::abs(k2(0, 0) - 3.0) < 1e-15);
    CHECK(std::abs(k2(0, 1) - 4.0) < 1e-15);
    CHECK(std::abs(k2(0, 2) - 6.0) < 1e-15);
    CHECK(std::abs(k2(0, 3) - 8.0) < 1e-15);

    Rng rng(9);
    const CMatrix x = complex_gaussian(rng, 2, 2, 1.0);
    const CMatrix y = complex_gaussian(rng, 3, 1, 1.0);
    const CMatrix z = complex_gaussian(rng, 2, 3, 1.0);
    const CMatrix xy = kron(x, y);
    CHECK(xy.rows() == 6);
    CHECK(xy.cols() == 2);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            CHECK(fro(xy.block(3 * i, j, 3, 1) - x(i, j) * y) < 1e-15);

    const CMatrix left = kron(kron(x, y), z);
    const CMatrix right = kron(x, kron(y, z));
    CHECK(left.rows() == right.rows());
    CHECK(left.cols() == right.cols());
    CHECK(fro(left - right) < 1e-12);
}

TEST_CASE("complex_gaussian moments and determinism")
{
    Rng rng(1);
    const CMatrix zero = complex_gaussian(rng, 3, 4, 0.0);
    CHECK(fro(zero) == 0.0);
    CHECK_THROWS_AS(complex_gaussian(rng, 2, 2, -1.0), ParameterError);

    Rng a(42), b(42);
    CHECK(fro(complex_gaussian(a, 4, 5, 1.0) - complex_gaussian(b, 4, 5, 1.0)) == 0.0);

    Rng big(7);
    const CMatrix s = complex_gaussian(big, 1000, 100, 2.0);
    const double var = s.squaredNorm() / static_cast<double>(s.size());
    CHECK(var == doctest::Approx(2.0).epsilon(0.05));
    double re = 0.0, im = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
    {
        re += s.data()[i].real() * s.data()[i].real();
        im += s.data()[i].imag() * s.data()[i].imag();
    }
    CHECK(re / static_cast<double>(s.size()) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(im / static_cast<double>(s.size()) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("numerical_rank and finiteness guards")
{
    Rng rng(2);
    const CMatrix a = complex_gaussian(rng, 8, 3, 1.0) * complex_gaussian(rng, 3, 8, 1.0);
    CHECK(numerical_rank(a) == 3);
    CHECK(numerical_rank(CMatrix::Zero(3, 3)) == 0);

    CMatrix bad = eye(2);
    CHECK(all_finite(bad));
    bad(1, 0) = cdouble(std::nan(""), 0.0);
    CHECK_FALSE(all_finite(bad));
    CHECK_THROWS_AS(require_finite(bad, "bad"), ParameterError);
    CHECK_NOTHROW(require_finite(eye(2), "ok"));
}
