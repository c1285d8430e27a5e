#pragma once

#include "reloc/descriptor.hpp"
#include "reloc/grid.hpp"
#include "reloc/sampler.hpp"
#include "reloc/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace reloc {

inline constexpr std::uint32_t kCloudVersion = 1;
inline constexpr std::uint32_t kDatabaseVersion = 1;

// Point clouds. Text: one "x y z" per line, '#' comments. Binary: "R3PC", u32
// version, u64 count, count x 3 little-endian f64.
void write_cloud_text(std::ostream& os, const PointCloud& cloud);
PointCloud read_cloud_text(std::istream& is, Frame frame = Frame::Map);
void write_cloud_binary(std::ostream& os, const PointCloud& cloud);
PointCloud read_cloud_binary(std::istream& is, Frame frame = Frame::Map);

/// Picks the format from the leading magic bytes.
PointCloud load_cloud(const std::filesystem::path& path, Frame frame = Frame::Map);
/// Binary for the ".r3pc" extension, text otherwise.
void save_cloud(const std::filesystem::path& path, const PointCloud& cloud);

/// Scan files in a directory (".xyz", ".txt", ".r3pc"), sorted by file name, or a
/// single file.
std::vector<PointCloud> load_scans(const std::filesystem::path& path);

// Descriptor database: "R3DB", u32 version, little-endian throughout.
void write_database(std::ostream& os, const DescriptorDatabase& db);
DescriptorDatabase read_database(std::istream& is);
void save_database(const std::filesystem::path& path, const DescriptorDatabase& db);
DescriptorDatabase load_database(const std::filesystem::path& path);

/// "x y z parent_index" per line; the root has parent -1.
void write_candidates(std::ostream& os, const CandidateSet& set);
CandidateSet read_candidates(std::istream& is);

/// "ix,iy,count" for every grid column (x, y) holding at least one sample.
void write_density_csv(std::ostream& os, const OccupancyGrid& grid, const CandidateSet& set);

/// Header "origin resolution dims", then run-length pairs "value count" in linear order.
void write_grid_text(std::ostream& os, const OccupancyGrid& grid);
OccupancyGrid read_grid_text(std::istream& is);

}  // namespace reloc
