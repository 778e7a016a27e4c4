#include "curvedray/media_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "curvedray/error.hpp"

namespace curvedray {

namespace {

constexpr const char* kMagic = "curvedray-grid";
constexpr int kVersion = 1;

void put_le_double(std::ostream& os, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    os.write(buf, 8);
}

double get_le_double(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) throw FormatError("grid: truncated binary data");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
    return std::bit_cast<double>(bits);
}

std::string expect_key(std::istream& is, const char* key) {
    std::string k;
    if (!(is >> k) || k != key) throw FormatError(std::string("grid: expected '") + key + "'");
    return k;
}

}  // namespace

Box3 MediaGrid::bounds() const {
    return {origin, origin + Vec3{(dims[0] - 1) * spacing.x, (dims[1] - 1) * spacing.y,
                                  (dims[2] - 1) * spacing.z}};
}

double MediaGrid::sample(const Vec3& x) const {
    int idx[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
        const double u = std::clamp((x[a] - origin[a]) / spacing[a], 0.0, double(dims[a] - 1));
        int i = static_cast<int>(std::floor(u));
        i = std::min(i, dims[a] - 2);
        idx[a] = i;
        t[a] = u - i;
    }
    double acc = 0.0;
    for (int c = 0; c < 8; ++c) {
        const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
        const double w = (dx ? t[0] : 1.0 - t[0]) * (dy ? t[1] : 1.0 - t[1]) * (dz ? t[2] : 1.0 - t[2]);
        if (w != 0.0) acc += w * at(idx[0] + dx, idx[1] + dy, idx[2] + dz);
    }
    return acc;
}

MediaGrid MediaGrid::converted(Quantity to) const {
    MediaGrid g = *this;
    g.quantity = to;
    for (double& v : g.values) v = convert_quantity(v, quantity, to, reference_speed);
    return g;
}

void MediaGrid::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] < 2) throw FormatError("grid: every dimension needs at least 2 samples");
        if (!(spacing[a] > 0.0)) throw FormatError("grid: spacing must be positive");
    }
    if (values.size() != size()) throw FormatError("grid: value count does not match dims");
    if (!(reference_speed > 0.0)) throw FormatError("grid: reference speed must be positive");
    for (double v : values)
        if (!std::isfinite(v) || !(v > 0.0)) throw FormatError("grid: values must be finite and positive");
}

MediaGrid bake_grid(const Profile& profile, std::array<int, 3> dims, const Vec3& origin,
                    const Vec3& spacing, Quantity quantity) {
    MediaGrid g;
    g.dims = dims;
    g.origin = origin;
    g.spacing = spacing;
    g.quantity = quantity;
    g.reference_speed = profile.reference_speed();
    for (int a = 0; a < 3; ++a)
        if (dims[a] < 2) throw DomainError("bake_grid: every dimension needs at least 2 samples");
    g.values.resize(g.size());
    for (int k = 0; k < dims[2]; ++k)
        for (int j = 0; j < dims[1]; ++j)
            for (int i = 0; i < dims[0]; ++i)
                g.values[g.linear_index(i, j, k)] = profile.value(g.position(i, j, k), quantity);
    g.validate();
    return g;
}

void write_grid(const MediaGrid& grid, std::ostream& os, GridEncoding encoding) {
    grid.validate();
    os << kMagic << ' ' << kVersion << '\n';
    os << std::setprecision(17);
    os << "dims " << grid.dims[0] << ' ' << grid.dims[1] << ' ' << grid.dims[2] << '\n';
    os << "origin " << grid.origin.x << ' ' << grid.origin.y << ' ' << grid.origin.z << '\n';
    os << "spacing " << grid.spacing.x << ' ' << grid.spacing.y << ' ' << grid.spacing.z << '\n';
    os << "quantity " << quantity_name(grid.quantity) << '\n';
    os << "reference_speed " << grid.reference_speed << '\n';
    os << "encoding " << (encoding == GridEncoding::binary ? "binary" : "text") << '\n';
    os << "data\n";
    if (encoding == GridEncoding::binary) {
        for (double v : grid.values) put_le_double(os, v);
    } else {
        for (std::size_t i = 0; i < grid.values.size(); ++i)
            os << grid.values[i] << ((i + 1) % static_cast<std::size_t>(grid.dims[0]) == 0 ? '\n' : ' ');
    }
    if (!os) throw IoError("grid: write failed");
}

void write_grid(const MediaGrid& grid, const std::filesystem::path& path, GridEncoding encoding) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    write_grid(grid, os, encoding);
}

MediaGrid read_grid(std::istream& is) {
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != kMagic) throw FormatError("grid: missing header");
    if (version != kVersion) throw VersionError("grid: unsupported version " + std::to_string(version));
    MediaGrid g;
    expect_key(is, "dims");
    is >> g.dims[0] >> g.dims[1] >> g.dims[2];
    expect_key(is, "origin");
    is >> g.origin.x >> g.origin.y >> g.origin.z;
    expect_key(is, "spacing");
    is >> g.spacing.x >> g.spacing.y >> g.spacing.z;
    std::string q, enc;
    expect_key(is, "quantity");
    is >> q;
    g.quantity = parse_quantity(q);
    expect_key(is, "reference_speed");
    is >> g.reference_speed;
    expect_key(is, "encoding");
    is >> enc;
    expect_key(is, "data");
    if (!is) throw FormatError("grid: malformed header");
    for (int a = 0; a < 3; ++a)
        if (g.dims[a] < 2 || g.dims[a] > (1 << 16)) throw FormatError("grid: bad dims");
    g.values.resize(g.size());
    if (enc == "binary") {
        if (is.get() != '\n') throw FormatError("grid: expected newline before binary data");
        for (double& v : g.values) v = get_le_double(is);
    } else if (enc == "text") {
        for (double& v : g.values)
            if (!(is >> v)) throw FormatError("grid: truncated text data");
    } else {
        throw FormatError("grid: unknown encoding '" + enc + "'");
    }
    g.validate();
    return g;
}

MediaGrid read_grid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path.string() + "'");
    return read_grid(is);
}

}  // namespace curvedray
