#pragma once

#include <filesystem>

#include "contactlab/numerics/box.hpp"

namespace contactlab {

// 16-byte magic "CONTACTLAB-FLD1\0", then little-endian u32 m, f64 side and
// m^3 complex values as interleaved f64 pairs, x fastest.
void write_field(const WaveField& field, const std::filesystem::path& path);
// Throws FormatError: field_magic, field_truncated, field_trailing, field_m,
// field_side, field_open.
WaveField read_field(const std::filesystem::path& path);

}  // namespace contactlab
