#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "shearlab/io.hpp"

namespace shearlab::io {

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::invalid_argument("write_csv: ragged row");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << format_full(row[c]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path.string());
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.columns.size())
            throw std::runtime_error("read_csv: ragged row in " + path.string());
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_checksum: cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    char hex[24];
    std::snprintf(hex, sizeof(hex), "fnv64:%016llx", static_cast<unsigned long long>(h));
    return hex;
}

namespace {

constexpr char kMagic[8] = {'S', 'H', 'E', 'A', 'R', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

void put_component(std::ofstream& out, const char* name, const std::vector<double>& data) {
    char label[8] = {};
    std::strncpy(label, name, sizeof(label) - 1);
    out.write(label, sizeof(label));
    put<std::uint64_t>(out, data.size());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
}

std::vector<double> get_component(std::ifstream& in, const char* expect) {
    char label[8] = {};
    in.read(label, sizeof(label));
    if (std::strncmp(label, expect, sizeof(label)) != 0)
        throw std::runtime_error(std::string("read_snapshot: expected component ") + expect);
    const auto n = get<std::uint64_t>(in);
    std::vector<double> data(n);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(double)));
    return data;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const solver::VelocityField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_snapshot: cannot open " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(field.n1()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(field.n2()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(field.n3()));
    put(out, field.dx1());
    put(out, field.dx2());
    put(out, field.dx3());
    put(out, field.time);
    put(out, field.wall_speed);
    put<std::uint32_t>(out, 4);
    put_component(out, "u1", field.u1_data());
    put_component(out, "u2", field.u2_data());
    put_component(out, "u3", field.u3_data());
    put_component(out, "p", field.p_data());
    if (!out) throw std::runtime_error("write_snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_snapshot: cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("read_snapshot: bad magic in " + path.string());
    if (get<std::uint32_t>(in) != kVersion)
        throw std::runtime_error("read_snapshot: unsupported version in " + path.string());
    Snapshot s;
    s.n1 = static_cast<int>(get<std::uint32_t>(in));
    s.n2 = static_cast<int>(get<std::uint32_t>(in));
    s.n3 = static_cast<int>(get<std::uint32_t>(in));
    s.dx1 = get<double>(in);
    s.dx2 = get<double>(in);
    s.dx3 = get<double>(in);
    s.time = get<double>(in);
    s.wall_speed = get<double>(in);
    if (get<std::uint32_t>(in) != 4)
        throw std::runtime_error("read_snapshot: unexpected component count");
    s.u1 = get_component(in, "u1");
    s.u2 = get_component(in, "u2");
    s.u3 = get_component(in, "u3");
    s.p = get_component(in, "p");
    if (!in) throw std::runtime_error("read_snapshot: truncated file " + path.string());
    return s;
}

}  // namespace shearlab::io
