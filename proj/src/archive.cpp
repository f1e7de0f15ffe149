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

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace clrajo {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'L', 'R', 'J'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 32;

template <typename T>
void put(std::ostream &os, T value)
{
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), bytes.size());
}

template <typename T>
T take(std::istream &is)
{
    std::array<char, sizeof(T)> bytes;
    if (!is.read(bytes.data(), bytes.size()))
        throw std::runtime_error("archive: unexpected end of stream");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

void put_string(std::ostream &os, const std::string &s)
{
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string take_string(std::istream &is)
{
    const auto len = take<std::uint32_t>(is);
    if (len > (1u << 20))
        throw std::runtime_error("archive: implausible string length");
    std::string s(len, '\0');
    if (len > 0 && !is.read(s.data(), len))
        throw std::runtime_error("archive: unexpected end of stream");
    return s;
}

} // namespace

void MatrixArchive::add(std::string name, CMatrix m)
{
    records.emplace_back(std::move(name), std::move(m));
}

void MatrixArchive::add_scalar(std::string name, double value)
{
    CMatrix m(1, 1);
    m(0, 0) = value;
    add(std::move(name), std::move(m));
}

const CMatrix &MatrixArchive::get(const std::string &name) const
{
    for (const auto &[n, m] : records)
        if (n == name)
            return m;
    throw std::out_of_range("archive '" + kind + "': missing record '" + name + "'");
}

double MatrixArchive::get_scalar(const std::string &name) const
{
    const CMatrix &m = get(name);
    if (m.rows() != 1 || m.cols() != 1)
        throw DimensionError("archive: record '" + name + "' is not a scalar");
    return m(0, 0).real();
}

bool MatrixArchive::contains(const std::string &name) const
{
    for (const auto &rec : records)
        if (rec.first == name)
            return true;
    return false;
}

void write_archive(std::ostream &os, const MatrixArchive &archive)
{
    os.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(os, kVersion);
    put_string(os, archive.kind);
    put<std::uint64_t>(os, archive.records.size());
    for (const auto &[name, m] : archive.records)
    {
        put_string(os, name);
        put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
        put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
            {
                put<double>(os, m(r, c).real());
                put<double>(os, m(r, c).imag());
            }
    }
    if (!os)
        throw std::runtime_error("archive: write failed");
}

MatrixArchive read_archive(std::istream &is)
{
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic)
        throw std::runtime_error("archive: bad magic");
    const auto version = take<std::uint32_t>(is);
    if (version != kVersion)
        throw std::runtime_error("archive: unsupported version " + std::to_string(version));

    MatrixArchive archive;
    archive.kind = take_string(is);
    const auto count = take<std::uint64_t>(is);
    for (std::uint64_t i = 0; i < count; ++i)
    {
        std::string name = take_string(is);
        const auto rows = take<std::uint64_t>(is);
        const auto cols = take<std::uint64_t>(is);
        if (rows > kMaxDim || cols > kMaxDim)
            throw std::runtime_error("archive: implausible dimensions for '" + name + "'");
        CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
            {
                const double re = take<double>(is);
                const double im = take<double>(is);
                m(r, c) = cdouble(re, im);
            }
        archive.add(std::move(name), std::move(m));
    }
    return archive;
}

void save_archive(const std::filesystem::path &path, const MatrixArchive &archive)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    try
    {
        write_archive(os, archive);
    }
    catch (const std::exception &e)
    {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

MatrixArchive load_archive(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    try
    {
        return read_archive(is);
    }
    catch (const std::exception &e)
    {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

} // namespace clrajo
