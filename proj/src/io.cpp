#include "mfg/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <algorithm>
#include <sstream>
#include <system_error>

#include "mfg/error.hpp"

namespace mfg {
namespace {

static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);

void put_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

double get_le(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(',');
    out += cells[i];
  }
  out.push_back('\n');
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string encode_snapshot(const FieldHistory& h) {
  if (h.first_index() != 0) throw std::invalid_argument("encode_snapshot: partial histories are not stored");
  const TorusGrid& g = h.grid();
  std::string out = std::string(snapshot_magic) + " " + std::to_string(g.dim()) + " " +
                    std::to_string(g.points_per_axis()) + " " +
                    std::to_string(h.time_grid().steps()) + " " +
                    format_double(h.time_grid().horizon()) + "\n";
  out.reserve(out.size() + h.frame_count() * g.size() * 8);
  for (const auto& f : h.frames())
    for (double v : f.values()) put_le(out, v);
  return out;
}

void write_snapshot(const std::filesystem::path& path, const FieldHistory& h) {
  write_file_atomic(path, encode_snapshot(h));
}

FieldHistory decode_snapshot(const std::string& bytes, const std::string& name,
                             const SnapshotExpectation& expect) {
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string::npos || eol > 256)
    throw SnapshotError(name, 0, "missing header line");
  const std::string header = bytes.substr(0, eol);
  const std::size_t magic_len = std::strlen(snapshot_magic);
  if (header.compare(0, magic_len, snapshot_magic) != 0 ||
      (header.size() > magic_len && header[magic_len] != ' '))
    throw SnapshotError(name, 0, "bad magic, expected " + std::string(snapshot_magic));

  // Fields with their byte offsets inside the header.
  std::vector<std::pair<std::string, std::size_t>> tokens;
  for (std::size_t pos = magic_len; pos < header.size();) {
    while (pos < header.size() && header[pos] == ' ') ++pos;
    if (pos >= header.size()) break;
    const std::size_t end = std::min(header.find(' ', pos), header.size());
    tokens.emplace_back(header.substr(pos, end - pos), pos);
    pos = end;
  }
  if (tokens.size() != 4)
    throw SnapshotError(name, magic_len, "header must list d, n, nt and T");

  auto parse_int = [&](int i, const char* what) {
    const auto& [text, off] = tokens[static_cast<std::size_t>(i)];
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size()) throw SnapshotError(name, off, std::string("malformed ") + what);
    return static_cast<int>(v);
  };
  const int d = parse_int(0, "dimension");
  const int n = parse_int(1, "points per axis");
  const int nt = parse_int(2, "step count");
  double T = 0.0;
  {
    const auto& [text, off] = tokens[3];
    std::size_t used = 0;
    try {
      T = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || !(T > 0.0)) throw SnapshotError(name, off, "malformed horizon T");
  }
  if (d < 1 || d > 3) throw SnapshotError(name, tokens[0].second, "dimension must be 1, 2 or 3");
  if (n < 4) throw SnapshotError(name, tokens[1].second, "points per axis must be at least 4");
  if (nt < 1) throw SnapshotError(name, tokens[2].second, "step count must be at least 1");
  if (expect.d && expect.d != d)
    throw SnapshotError(name, tokens[0].second,
                        "dimension " + std::to_string(d) + " but expected " + std::to_string(expect.d));
  if (expect.n && expect.n != n)
    throw SnapshotError(name, tokens[1].second,
                        "n = " + std::to_string(n) + " but expected " + std::to_string(expect.n));
  if (expect.nt && expect.nt != nt)
    throw SnapshotError(name, tokens[2].second,
                        "nt = " + std::to_string(nt) + " but expected " + std::to_string(expect.nt));

  const TorusGrid grid(d, n);
  const TimeGrid time(T, nt);
  const std::size_t body = eol + 1;
  const std::size_t need = static_cast<std::size_t>(nt + 1) * grid.size() * 8;
  if (bytes.size() - body != need)
    throw SnapshotError(name, std::min(bytes.size(), body + need),
                        "payload has " + std::to_string(bytes.size() - body) + " bytes, expected " +
                            std::to_string(need));
  FieldHistory out(grid, time);
  const char* p = bytes.data() + body;
  for (int k = 0; k <= nt; ++k) {
    ScalarField& f = out.at(k);
    for (std::size_t i = 0; i < grid.size(); ++i, p += 8) {
      const double v = get_le(p);
      if (!std::isfinite(v))
        throw SnapshotError(name, static_cast<std::size_t>(p - bytes.data()), "non-finite value");
      f[i] = v;
    }
  }
  return out;
}

FieldHistory read_snapshot(const std::filesystem::path& path, const SnapshotExpectation& expect) {
  return decode_snapshot(read_file(path), path.string(), expect);
}

}  // namespace mfg
