// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "fom/snapshot.hpp"

namespace hbrom::io {

// Binary snapshot container:
//   bytes 0..7   magic "PODSNAP1"
//   bytes 8..11  header length, unsigned 32-bit little-endian
//   header       UTF-8 JSON {version, source, nt, ndof, fields, times, params?}
//   payload      nt * ndof doubles, 64-bit little-endian, row-major
void write_snapshot_file(const fom::SnapshotSet& s, const std::string& path);
fom::SnapshotSet read_snapshot_file(const std::string& path);

} // namespace hbrom::io
