#include "curvedray/mesh_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "curvedray/error.hpp"

namespace curvedray {

namespace {

constexpr char kMagic[8] = {'C', 'R', 'M', 'E', 'S', 'H', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "mesh cache assumes a little-endian host");

class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}
    template <class T>
    void put(const T& v) {
        os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put(const Vec3& v) {
        put(v.x);
        put(v.y);
        put(v.z);
    }
    void count(std::size_t n) { put(static_cast<std::uint64_t>(n)); }

private:
    std::ostream& os_;
};

class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}
    template <class T>
    T get() {
        T v{};
        if (!is_.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("mesh: truncated file");
        return v;
    }
    Vec3 vec() {
        const double x = get<double>(), y = get<double>(), z = get<double>();
        return {x, y, z};
    }
    std::size_t count(std::size_t limit = std::size_t{1} << 34) {
        const auto n = get<std::uint64_t>();
        if (n > limit) throw FormatError("mesh: implausible array length");
        return static_cast<std::size_t>(n);
    }

private:
    std::istream& is_;
};

}  // namespace

void write_mesh(const AdaptiveMesh& mesh, std::ostream& os) {
    Writer w(os);
    os.write(kMagic, sizeof kMagic);
    w.put(kVersion);
    w.put(static_cast<std::uint8_t>(mesh.quantity));
    w.put(static_cast<std::uint8_t>(mesh.gradient_method));
    w.put(mesh.reference_speed);

    w.count(mesh.vertices.size());
    for (const auto& v : mesh.vertices) {
        w.put(v.position);
        w.put(v.value);
        w.put(v.spacing);
    }
    w.count(mesh.tets.size());
    for (const auto& t : mesh.tets)
        for (int i : t) w.put(static_cast<std::int32_t>(i));
    for (const auto& n : mesh.neighbors)
        for (int i : n) w.put(static_cast<std::int32_t>(i));
    w.count(mesh.gradients.size());
    for (const auto& g : mesh.gradients) {
        w.put(g.grad);
        w.put(static_cast<std::uint8_t>(g.fallback));
    }
    w.count(mesh.scene.triangles.size());
    for (const auto& t : mesh.scene.triangles) {
        for (const auto& v : t.v) w.put(v);
        w.put(static_cast<std::int32_t>(t.surface_id));
    }
    w.count(mesh.scene.reflective.size());
    for (const auto& [id, refl] : mesh.scene.reflective) {
        w.put(static_cast<std::int32_t>(id));
        w.put(static_cast<std::uint8_t>(refl));
    }
    w.count(mesh.link_offsets.size());
    for (int o : mesh.link_offsets) w.put(static_cast<std::int32_t>(o));
    w.count(mesh.link_ids.size());
    for (int i : mesh.link_ids) w.put(static_cast<std::int32_t>(i));
    if (!os) throw IoError("mesh: write failed");
}

void write_mesh(const AdaptiveMesh& mesh, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    write_mesh(mesh, os);
}

AdaptiveMesh read_mesh(std::istream& is) {
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw FormatError("mesh: not a mesh cache file");
    Reader r(is);
    const auto version = r.get<std::uint32_t>();
    if (version != kVersion) throw VersionError("mesh: unsupported version " + std::to_string(version));

    AdaptiveMesh m;
    const auto q = r.get<std::uint8_t>();
    const auto gm = r.get<std::uint8_t>();
    if (q > static_cast<std::uint8_t>(Quantity::index_squared)) throw FormatError("mesh: bad quantity tag");
    if (gm > static_cast<std::uint8_t>(GradientMethod::green_gauss)) throw FormatError("mesh: bad gradient tag");
    m.quantity = static_cast<Quantity>(q);
    m.gradient_method = static_cast<GradientMethod>(gm);
    m.reference_speed = r.get<double>();

    m.vertices.resize(r.count());
    for (auto& v : m.vertices) {
        v.position = r.vec();
        v.value = r.get<double>();
        v.spacing = r.get<double>();
    }
    const std::size_t nt = r.count();
    const int nv = static_cast<int>(m.vertices.size());
    m.tets.resize(nt);
    m.neighbors.resize(nt);
    for (auto& t : m.tets)
        for (int& i : t) {
            i = r.get<std::int32_t>();
            if (i < 0 || i >= nv) throw FormatError("mesh: vertex index out of range");
        }
    for (auto& n : m.neighbors)
        for (int& i : n) {
            i = r.get<std::int32_t>();
            if (i < -1 || i >= static_cast<int>(nt)) throw FormatError("mesh: neighbor index out of range");
        }
    const std::size_t ng = r.count();
    if (ng != 0 && ng != nt) throw FormatError("mesh: gradient count does not match tets");
    m.gradients.resize(ng);
    for (auto& g : m.gradients) {
        const Vec3 grad = r.vec();
        g = CellGradient::from(grad, r.get<std::uint8_t>() != 0);
    }
    m.scene.triangles.resize(r.count());
    for (auto& t : m.scene.triangles) {
        for (auto& v : t.v) v = r.vec();
        t.surface_id = r.get<std::int32_t>();
    }
    const std::size_t nmat = r.count();
    for (std::size_t k = 0; k < nmat; ++k) {
        const int id = r.get<std::int32_t>();
        m.scene.reflective[id] = r.get<std::uint8_t>() != 0;
    }
    m.link_offsets.resize(r.count());
    for (int& o : m.link_offsets) o = r.get<std::int32_t>();
    m.link_ids.resize(r.count());
    const int ntri = static_cast<int>(m.scene.triangles.size());
    for (int& i : m.link_ids) {
        i = r.get<std::int32_t>();
        if (i < 0 || i >= ntri) throw FormatError("mesh: linked triangle out of range");
    }
    if (m.link_offsets.size() != nt + 1 && !(m.link_offsets.size() == 1 && m.link_ids.empty()))
        throw FormatError("mesh: link table does not match tets");
    for (std::size_t k = 1; k < m.link_offsets.size(); ++k)
        if (m.link_offsets[k] < m.link_offsets[k - 1] || m.link_offsets[k] > static_cast<int>(m.link_ids.size()))
            throw FormatError("mesh: malformed link offsets");
    m.rebuild_geometry();
    return m;
}

AdaptiveMesh read_mesh(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path.string() + "'");
    return read_mesh(is);
}

}  // namespace curvedray
