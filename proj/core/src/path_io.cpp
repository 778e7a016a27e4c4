#include "curvedray/path_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "curvedray/error.hpp"
#include "json.hpp"

namespace curvedray {

namespace {

constexpr char kMagic[8] = {'C', 'R', 'P', 'A', 'T', 'H', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "path files assume a little-endian host");

Termination parse_termination(std::string_view s) {
    for (Termination t : {Termination::exited, Termination::max_depth, Termination::max_travel, Termination::trapped,
                          Termination::absorbed})
        if (termination_name(t) == s) return t;
    throw FormatError("paths: unknown termination '" + std::string(s) + "'");
}

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

Vec3 json_vec(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw FormatError("paths: expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
void put(std::ostream& os, const Vec3& v) {
    put(os, v.x);
    put(os, v.y);
    put(os, v.z);
}
void put_string(std::ostream& os, const std::string& s) {
    put(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("paths: truncated file");
    return v;
}
Vec3 get_vec(std::istream& is) {
    const double x = get<double>(is), y = get<double>(is), z = get<double>(is);
    return {x, y, z};
}
std::string get_string(std::istream& is) {
    const auto n = get<std::uint32_t>(is);
    if (n > (1u << 24)) throw FormatError("paths: implausible string length");
    std::string s(n, '\0');
    if (n && !is.read(s.data(), n)) throw FormatError("paths: truncated file");
    return s;
}
std::size_t get_count(std::istream& is) {
    const auto n = get<std::uint64_t>(is);
    if (n > (std::uint64_t{1} << 32)) throw FormatError("paths: implausible array length");
    return static_cast<std::size_t>(n);
}

}  // namespace

PathRecord make_path_record(const PropagationPath& path, int samples) {
    PathRecord r;
    r.origin = path.origin;
    r.direction = path.direction;
    r.end_point = path.end_point;
    r.end_direction = path.end_direction;
    r.termination = path.termination;
    r.total_travel = path.total_travel;
    r.diagnostic = path.diagnostic;
    r.events = path.events;
    double s0 = 0.0;
    r.points.push_back({path.origin.x, path.origin.y, path.origin.z, 0.0});
    for (const auto& seg : path.segments) {
        for (int k = 1; k <= samples; ++k) {
            const double p = seg.curve.param_end * k / (samples + 1);
            const Vec3 x = seg.curve.point(p);
            r.points.push_back({x.x, x.y, x.z, s0 + seg.curve.arc_length(p)});
        }
        s0 += seg.length;
        r.points.push_back({seg.exit.x, seg.exit.y, seg.exit.z, s0});
    }
    if (path.segments.empty() && distance(path.end_point, path.origin) > 0.0)
        r.points.push_back({path.end_point.x, path.end_point.y, path.end_point.z, path.total_travel});
    return r;
}

PathSet make_path_set(const std::vector<PropagationPath>& paths, std::string source, int samples) {
    PathSet set;
    set.source = std::move(source);
    set.rays.reserve(paths.size());
    for (const auto& p : paths) set.rays.push_back(make_path_record(p, samples));
    return set;
}

std::vector<PropagationPath> summary_paths(const PathSet& set) {
    std::vector<PropagationPath> out;
    for (const auto& r : set.rays) {
        PropagationPath p;
        p.origin = r.origin;
        p.direction = r.direction;
        p.end_point = r.end_point;
        p.end_direction = r.end_direction;
        p.termination = r.termination;
        p.total_travel = r.total_travel;
        p.diagnostic = r.diagnostic;
        p.events = r.events;
        out.push_back(std::move(p));
    }
    return out;
}

PathFormat parse_path_format(std::string_view name) {
    if (name == "csv") return PathFormat::csv;
    if (name == "json") return PathFormat::json;
    if (name == "binary" || name == "bin") return PathFormat::binary;
    throw FormatError("unknown path format '" + std::string(name) + "'");
}

PathFormat path_format_for(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return PathFormat::csv;
    if (ext == ".json") return PathFormat::json;
    return PathFormat::binary;
}

void write_paths_csv(const PathSet& set, std::ostream& os) {
    os << std::setprecision(17);
    os << "ray,record,index,x,y,z,s,dx,dy,dz,termination,source,surface_id\n";
    for (std::size_t i = 0; i < set.rays.size(); ++i) {
        const auto& r = set.rays[i];
        os << i << ",ray,0," << r.origin.x << ',' << r.origin.y << ',' << r.origin.z << ',' << r.total_travel << ','
           << r.direction.x << ',' << r.direction.y << ',' << r.direction.z << ',' << termination_name(r.termination)
           << ',' << set.source << ",\n";
        for (std::size_t k = 0; k < r.points.size(); ++k) {
            const auto& p = r.points[k];
            os << i << ",point," << k << ',' << p[0] << ',' << p[1] << ',' << p[2] << ',' << p[3] << ",,,,,,\n";
        }
        for (std::size_t k = 0; k < r.events.size(); ++k) {
            const auto& e = r.events[k];
            os << i << ",event," << k << ',' << e.position.x << ',' << e.position.y << ',' << e.position.z << ','
               << e.travel << ',' << e.reflected.x << ',' << e.reflected.y << ',' << e.reflected.z << ",,,"
               << e.surface_id << '\n';
        }
        os << i << ",end,0," << r.end_point.x << ',' << r.end_point.y << ',' << r.end_point.z << ',' << r.total_travel
           << ',' << r.end_direction.x << ',' << r.end_direction.y << ',' << r.end_direction.z << ",,,\n";
    }
    if (!os) throw IoError("paths: write failed");
}

void write_paths_json(const PathSet& set, std::ostream& os) {
    nlohmann::json j;
    j["format"] = "curvedray-paths";
    j["version"] = kVersion;
    j["source"] = set.source;
    if (set.source == "curved") j["segment_media_value"] = "barycentric at cell entry point";
    auto& rays = j["rays"] = nlohmann::json::array();
    for (const auto& r : set.rays) {
        nlohmann::json jr;
        jr["origin"] = vec_json(r.origin);
        jr["direction"] = vec_json(r.direction);
        jr["end_point"] = vec_json(r.end_point);
        jr["end_direction"] = vec_json(r.end_direction);
        jr["termination"] = std::string(termination_name(r.termination));
        jr["total_travel"] = r.total_travel;
        jr["diagnostic"] = r.diagnostic;
        auto& pts = jr["points"] = nlohmann::json::array();
        for (const auto& p : r.points) pts.push_back({p[0], p[1], p[2], p[3]});
        auto& evs = jr["events"] = nlohmann::json::array();
        for (const auto& e : r.events)
            evs.push_back({{"position", vec_json(e.position)},
                           {"incident", vec_json(e.incident)},
                           {"reflected", vec_json(e.reflected)},
                           {"surface_id", e.surface_id},
                           {"triangle", e.triangle},
                           {"travel", e.travel}});
        rays.push_back(std::move(jr));
    }
    os << j.dump(1) << '\n';
    if (!os) throw IoError("paths: write failed");
}

void write_paths_binary(const PathSet& set, std::ostream& os) {
    os.write(kMagic, sizeof kMagic);
    put(os, kVersion);
    put_string(os, set.source);
    put(os, static_cast<std::uint64_t>(set.rays.size()));
    for (const auto& r : set.rays) {
        put(os, r.origin);
        put(os, r.direction);
        put(os, r.end_point);
        put(os, r.end_direction);
        put(os, static_cast<std::uint8_t>(r.termination));
        put(os, r.total_travel);
        put_string(os, r.diagnostic);
        put(os, static_cast<std::uint64_t>(r.points.size()));
        for (const auto& p : r.points)
            for (double v : p) put(os, v);
        put(os, static_cast<std::uint64_t>(r.events.size()));
        for (const auto& e : r.events) {
            put(os, e.position);
            put(os, e.incident);
            put(os, e.reflected);
            put(os, static_cast<std::int32_t>(e.surface_id));
            put(os, static_cast<std::int32_t>(e.triangle));
            put(os, e.travel);
        }
    }
    if (!os) throw IoError("paths: write failed");
}

void write_paths(const PathSet& set, const std::filesystem::path& path, PathFormat format) {
    std::ofstream os(path, format == PathFormat::binary ? std::ios::binary : std::ios::out);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    switch (format) {
        case PathFormat::csv: write_paths_csv(set, os); break;
        case PathFormat::json: write_paths_json(set, os); break;
        case PathFormat::binary: write_paths_binary(set, os); break;
    }
}

PathSet read_paths_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("ray,record,index,x,y,z,s", 0) != 0)
        throw FormatError("paths: missing CSV header");
    PathSet set;
    std::size_t lineno = 1;
    auto num = [&](const std::string& f) {
        try {
            std::size_t used = 0;
            const double v = std::stod(f, &used);
            if (used != f.size()) throw std::invalid_argument(f);
            return v;
        } catch (const std::exception&) {
            throw FormatError("paths: line " + std::to_string(lineno) + ": bad number '" + f + "'");
        }
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        while (f.size() < 13) f.emplace_back();
        const std::size_t ray = static_cast<std::size_t>(num(f[0]));
        const std::string& rec = f[1];
        if (rec == "ray") {
            if (ray != set.rays.size()) throw FormatError("paths: line " + std::to_string(lineno) + ": ray out of order");
            PathRecord r;
            r.origin = {num(f[3]), num(f[4]), num(f[5])};
            r.total_travel = num(f[6]);
            r.direction = {num(f[7]), num(f[8]), num(f[9])};
            r.termination = parse_termination(f[10]);
            set.source = f[11];
            set.rays.push_back(std::move(r));
            continue;
        }
        if (ray + 1 != set.rays.size()) throw FormatError("paths: line " + std::to_string(lineno) + ": record before its ray");
        PathRecord& r = set.rays.back();
        if (rec == "point") {
            r.points.push_back({num(f[3]), num(f[4]), num(f[5]), num(f[6])});
        } else if (rec == "event") {
            BoundaryEvent e;
            e.position = {num(f[3]), num(f[4]), num(f[5])};
            e.travel = num(f[6]);
            e.reflected = {num(f[7]), num(f[8]), num(f[9])};
            e.surface_id = static_cast<int>(num(f[12]));
            r.events.push_back(e);
        } else if (rec == "end") {
            r.end_point = {num(f[3]), num(f[4]), num(f[5])};
            r.end_direction = {num(f[7]), num(f[8]), num(f[9])};
        } else {
            throw FormatError("paths: line " + std::to_string(lineno) + ": unknown record '" + rec + "'");
        }
    }
    return set;
}

PathSet read_paths_json(std::istream& is) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("paths: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "curvedray-paths") throw FormatError("paths: not a path document");
    if (j.value("version", 0u) != kVersion) throw VersionError("paths: unsupported version");
    try {
        PathSet set;
        set.source = j.at("source").get<std::string>();
        for (const auto& jr : j.at("rays")) {
            PathRecord r;
            r.origin = json_vec(jr.at("origin"));
            r.direction = json_vec(jr.at("direction"));
            r.end_point = json_vec(jr.at("end_point"));
            r.end_direction = json_vec(jr.at("end_direction"));
            r.termination = parse_termination(jr.at("termination").get<std::string>());
            r.total_travel = jr.at("total_travel").get<double>();
            r.diagnostic = jr.value("diagnostic", "");
            for (const auto& p : jr.at("points")) {
                if (!p.is_array() || p.size() != 4) throw FormatError("paths: point needs 4 values");
                r.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>(), p[3].get<double>()});
            }
            for (const auto& je : jr.at("events")) {
                BoundaryEvent e;
                e.position = json_vec(je.at("position"));
                e.incident = json_vec(je.at("incident"));
                e.reflected = json_vec(je.at("reflected"));
                e.surface_id = je.at("surface_id").get<int>();
                e.triangle = je.value("triangle", -1);
                e.travel = je.at("travel").get<double>();
                r.events.push_back(e);
            }
            set.rays.push_back(std::move(r));
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("paths: ") + e.what());
    }
}

PathSet read_paths_binary(std::istream& is) {
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw FormatError("paths: not a binary path file");
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw VersionError("paths: unsupported version " + std::to_string(version));
    PathSet set;
    set.source = get_string(is);
    set.rays.resize(get_count(is));
    for (auto& r : set.rays) {
        r.origin = get_vec(is);
        r.direction = get_vec(is);
        r.end_point = get_vec(is);
        r.end_direction = get_vec(is);
        const auto t = get<std::uint8_t>(is);
        if (t > static_cast<std::uint8_t>(Termination::absorbed)) throw FormatError("paths: bad termination tag");
        r.termination = static_cast<Termination>(t);
        r.total_travel = get<double>(is);
        r.diagnostic = get_string(is);
        r.points.resize(get_count(is));
        for (auto& p : r.points)
            for (double& v : p) v = get<double>(is);
        r.events.resize(get_count(is));
        for (auto& e : r.events) {
            e.position = get_vec(is);
            e.incident = get_vec(is);
            e.reflected = get_vec(is);
            e.surface_id = get<std::int32_t>(is);
            e.triangle = get<std::int32_t>(is);
            e.travel = get<double>(is);
        }
    }
    return set;
}

PathSet read_paths(const std::filesystem::path& path) {
    const PathFormat f = path_format_for(path);
    std::ifstream is(path, f == PathFormat::binary ? std::ios::binary : std::ios::in);
    if (!is) throw IoError("cannot open '" + path.string() + "'");
    switch (f) {
        case PathFormat::csv: return read_paths_csv(is);
        case PathFormat::json: return read_paths_json(is);
        case PathFormat::binary: break;
    }
    return read_paths_binary(is);
}

}  // namespace curvedray
