#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mfg/history.hpp"

namespace mfg {

/// Shortest decimal text that parses back to the same double ('.' decimal).
std::string format_double(double v);

/// Joins cells with ',' and terminates the row with a single LF.
std::string csv_row(const std::vector<std::string>& cells);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Snapshot format: one text line "MFGF1 <d> <n> <nt> <T>\n" (T in shortest
// round-trip form), then (nt+1) * n^d little-endian IEEE-754 doubles,
// frame-major, each frame in the grid's row-major node order.
inline constexpr const char* snapshot_magic = "MFGF1";

std::string encode_snapshot(const FieldHistory& h);
void write_snapshot(const std::filesystem::path& path, const FieldHistory& h);

struct SnapshotExpectation {
  int d = 0;  // 0 = accept any
  int n = 0;
  int nt = 0;
};
/// Throws SnapshotError naming the file and byte offset of the first problem.
FieldHistory read_snapshot(const std::filesystem::path& path, const SnapshotExpectation& expect = {});
FieldHistory decode_snapshot(const std::string& bytes, const std::string& name,
                             const SnapshotExpectation& expect = {});

}  // namespace mfg
