// File formats: full-precision CSV tables, self-describing binary field
// snapshots, and content checksums for the run manifest. All floating
// output is %.17g so values round-trip bit-exactly through text.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shearlab/solver.hpp"

namespace shearlab::io {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

std::string format_full(double v);

/// FNV-1a 64-bit checksum of a file's bytes, as "fnv64:<hex>".
std::string file_checksum(const std::filesystem::path& path);
std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Binary field snapshot: magic "SHEARFLD", version, dimensions, spacing,
/// time, wall speed, component directory, then little-endian 64-bit floats
/// for u1, u2, u3, p.
void write_snapshot(const std::filesystem::path& path, const solver::VelocityField& field);

struct Snapshot {
    int n1 = 0, n2 = 0, n3 = 0;
    double dx1 = 0.0, dx2 = 0.0, dx3 = 0.0;
    double time = 0.0;
    double wall_speed = 0.0;
    std::vector<double> u1, u2, u3, p;
};
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace shearlab::io
