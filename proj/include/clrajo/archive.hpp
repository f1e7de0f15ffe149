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

#ifndef CLRAJO_ARCHIVE_HPP
#define CLRAJO_ARCHIVE_HPP

#include "clrajo/numerics.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace clrajo {

// Ordered list of named complex matrices with a kind tag.
//
// Binary layout (all integers and doubles little-endian):
//   "CLRJ"                          4-byte magic
//   u32 version                     currently 1
//   u32 len, bytes                  kind tag, e.g. "channel_realization"
//   u64 count                       number of records
//   per record:
//     u32 len, bytes                record name
//     u64 rows, u64 cols
//     rows*cols pairs of f64        (re, im), row-major
struct MatrixArchive {
    std::string kind;
    std::vector<std::pair<std::string, CMatrix>> records;

    void add(std::string name, CMatrix m);
    void add_scalar(std::string name, double value);

    // Throws std::out_of_range when the record is missing.
    const CMatrix &get(const std::string &name) const;
    double get_scalar(const std::string &name) const;
    bool contains(const std::string &name) const;
};

void write_archive(std::ostream &os, const MatrixArchive &archive);
MatrixArchive read_archive(std::istream &is);

// File wrappers; I/O failures raise std::runtime_error carrying the path.
void save_archive(const std::filesystem::path &path, const MatrixArchive &archive);
MatrixArchive load_archive(const std::filesystem::path &path);

} // namespace clrajo

#endif
