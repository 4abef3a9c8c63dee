#include "contactlab/io/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "contactlab/error.hpp"

namespace contactlab {
namespace {

constexpr char kMagic[16] = "CONTACTLAB-FLD1";
constexpr std::size_t kHeader = 16 + 4 + 8;

void put_u64(std::string& out, std::uint64_t v, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_u64(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

}  // namespace

void write_field(const WaveField& field, const std::filesystem::path& path) {
  const auto& g = field.grid();
  std::string buf;
  buf.reserve(kHeader + 16 * field.size());
  buf.append(kMagic, 16);
  put_u64(buf, static_cast<std::uint32_t>(g.m()), 4);
  put_u64(buf, std::bit_cast<std::uint64_t>(g.side()), 8);
  for (const auto& z : field.values()) {
    put_u64(buf, std::bit_cast<std::uint64_t>(z.real()), 8);
    put_u64(buf, std::bit_cast<std::uint64_t>(z.imag()), 8);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("field_open", "cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("field_open", "write to " + path.string() + " failed");
}

WaveField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("field_open", "cannot open " + path.string());
  const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < kHeader)
    throw FormatError("field_truncated",
                      "expected at least " + std::to_string(kHeader) + " header bytes, found " + std::to_string(raw.size()),
                      kHeader, raw.size());
  if (std::memcmp(raw.data(), kMagic, 16) != 0) throw FormatError("field_magic", "not a contactlab field file");
  const std::uint64_t m = get_u64(p + 16, 4);
  const double side = std::bit_cast<double>(get_u64(p + 20, 8));
  if (m < 8 || (m & (m - 1)) != 0) throw FormatError("field_m", "m = " + std::to_string(m) + " is not a power of two >= 8");
  if (m > 65536) throw FormatError("field_m", "m = " + std::to_string(m) + " is too large");
  if (!(side > 0.0) || !std::isfinite(side)) throw FormatError("field_side", "side must be positive and finite");
  const std::uintmax_t expected = kHeader + 16 * m * m * m;
  if (raw.size() < expected)
    throw FormatError("field_truncated",
                      "expected " + std::to_string(expected) + " bytes, found " + std::to_string(raw.size()), expected,
                      raw.size());
  if (raw.size() > expected)
    throw FormatError("field_trailing",
                      "expected " + std::to_string(expected) + " bytes, found " + std::to_string(raw.size()), expected,
                      raw.size());
  const auto grid = BoxGrid3D::make(m, side);
  std::vector<cplx> v(grid.size());
  const unsigned char* q = p + kHeader;
  for (auto& z : v) {
    z = {std::bit_cast<double>(get_u64(q, 8)), std::bit_cast<double>(get_u64(q + 8, 8))};
    q += 16;
  }
  return WaveField(grid, std::move(v));
}

}  // namespace contactlab
