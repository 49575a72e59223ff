#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "acmp/acmp.hpp"

namespace acmp {

/// Little-endian binary container for an AcmpSet.
///
///   offset  size  field
///   0       8     magic "ACMPSET1"
///   8       4     int32 n
///   12      4     int32 N
///   16      8     float64 tau of D0
///   24      16    int32 rows of A0, C0, child A, child C
///   40      ...   float64 payloads, column-major: A0, C0, child A, child C
///
/// Optional tagged blocks may follow: 4-byte ASCII tag, uint64 count,
/// then `count` float64 values.
void write_set(std::ostream& os, const AcmpSet& set);
AcmpSet read_set(std::istream& is);

void write_block(std::ostream& os, const std::string& tag, const Vector& values);
/// Reads the next block and checks its tag; throws ParseError on mismatch or truncation.
Vector read_block(std::istream& is, const std::string& tag);

void save_set(const AcmpSet& set, const std::filesystem::path& path);
AcmpSet load_set(const std::filesystem::path& path);

}  // namespace acmp
