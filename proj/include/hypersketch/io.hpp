#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hypersketch/cascade.hpp"
#include "hypersketch/planner.hpp"
#include "hypersketch/pointset.hpp"

namespace hypersketch {

// Standard CRC-32 (reflected, polynomial 0xEDB88320).
std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0);

// Plain text point file: header line "n d mode", then one point per line,
// space-separated decimals printed with 17 significant digits so values
// round-trip exactly.
void write_point_file(const std::string& path, const PointSet& points);
PointSet read_point_file(const std::string& path);

// Binary sketch layout, all integers little-endian:
//   magic "HSKETCH1"
//   version u16 = 1, mode u8, n u64, d u64, levels u16,
//   epsilon f64, min_dist f64, r f64, min_sq_norm f64, master_seed u64,
//   dims levels x u64, norm_step f64 (0 in sphere mode)
//   payload: n records of ceil(N/64) u64 words (bit i of a record LSB-first)
//   norm block: n x u32 quantizer indices (ball mode only)
//   crc32 u32 over every preceding byte
std::vector<std::byte> serialize_sketch(const SketchBundle& bundle);
SketchBundle deserialize_sketch(const std::vector<std::byte>& bytes);

void write_sketch_file(const std::string& path, const SketchBundle& bundle);
SketchBundle read_sketch_file(const std::string& path);

// Human-readable plan dump, one "key = value" per line.
std::string plan_to_text(const CascadePlan& plan);

}  // namespace hypersketch
