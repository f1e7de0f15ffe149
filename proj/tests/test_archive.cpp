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

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace clrajo;

TEST_CASE("archive round trip through a stream")
{
    Rng rng(4);
    MatrixArchive a;
    a.kind = "unit";
    a.add("x", complex_gaussian(rng, 3, 5, 1.0));
    a.add("empty", CMatrix(0, 4));
    a.add_scalar("pi", 3.141592653589793);

    std::stringstream ss;
    write_archive(ss, a);
    const MatrixArchive b = read_archive(ss);
    CHECK(b.kind == "unit");
    REQUIRE(b.records.size() == 3);
    CHECK(b.get("x") == a.get("x"));
    CHECK(b.get("empty").rows() == 0);
    CHECK(b.get("empty").cols() == 4);
    CHECK(b.get_scalar("pi") == 3.141592653589793);
    CHECK(b.contains("x"));
    CHECK_FALSE(b.contains("y"));
    CHECK_THROWS_AS(b.get("y"), std::out_of_range);
}

TEST_CASE("archive header layout")
{
    MatrixArchive a;
    a.kind = "k";
    CMatrix m(1, 1);
    m(0, 0) = cdouble(1.0, -2.0);
    a.add("m", m);
    std::stringstream ss;
    write_archive(ss, a);
    const std::string bytes = ss.str();
    CHECK(bytes.substr(0, 4) == "CLRJ");
    // magic + version + kind + count + name + dims + one complex entry
    CHECK(bytes.size() == 4 + 4 + (4 + 1) + 8 + (4 + 1) + 16 + 16);
}

TEST_CASE("archive rejects corrupt input")
{
    std::stringstream bad("XXXX");
    CHECK_THROWS(read_archive(bad));

    MatrixArchive a;
    a.kind = "k";
    a.add("m", CMatrix::Ones(4, 4));
    std::stringstream ss;
    write_archive(ss, a);
    std::stringstream truncated(ss.str().substr(0, ss.str().size() - 10));
    CHECK_THROWS(read_archive(truncated));
}

TEST_CASE("archive file wrappers carry the path in errors")
{
    const auto dir = std::filesystem::temp_directory_path() / "clrajo_archive_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "a.clrj";
    MatrixArchive a;
    a.kind = "file";
    a.add_scalar("v", 2.5);
    save_archive(path, a);
    CHECK(load_archive(path).get_scalar("v") == 2.5);

    const auto missing = dir / "missing.clrj";
    try
    {
        load_archive(missing);
        FAIL("expected an exception");
    }
    catch (const std::runtime_error &e)
    {
        CHECK(std::string(e.what()).find("missing.clrj") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}
