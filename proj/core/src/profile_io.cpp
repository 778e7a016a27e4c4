#include "curvedray/profile_io.hpp"

#include <fstream>
#include <sstream>

#include "curvedray/error.hpp"
#include "json.hpp"

namespace curvedray {

namespace {

using nlohmann::json;

double num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw FormatError(std::string("profile: '") + key + "' must be a number");
    return j.at(key).get<double>();
}

Vec3 vec(const json& j, const char* key, const Vec3& fallback) {
    if (!j.contains(key)) return fallback;
    const json& a = j.at(key);
    if (!a.is_array() || a.size() != 3) throw FormatError(std::string("profile: '") + key + "' must be [x, y, z]");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

StratifiedParams stratified_params(const json& j) {
    StratifiedParams d;
    return {num(j, "b", d.b), num(j, "c0", d.c0), num(j, "zg", d.zg)};
}

json stratified_json(const StratifiedParams& p) { return {{"b", p.b}, {"c0", p.c0}, {"zg", p.zg}}; }

FluctuationField fluctuation(const json& j) {
    if (!j.contains("fluctuation")) return {};
    const json& f = j.at("fluctuation");
    if (f.contains("modes") && f.at("modes").is_array()) {
        FluctuationField field;
        for (const json& m : f.at("modes"))
            field.modes.push_back({vec(m, "k", {}), num(m, "phase", 0.0), num(m, "amplitude", 0.0)});
        return field;
    }
    return FluctuationField::random(static_cast<std::uint64_t>(num(f, "seed", 1.0)),
                                    static_cast<int>(num(f, "modes", 0.0)),
                                    num(f, "min_wavelength", 10.0), num(f, "max_wavelength", 50.0),
                                    num(f, "total_amplitude", 1e-3));
}

json fluctuation_json(const FluctuationField& f) {
    json modes = json::array();
    for (const auto& m : f.modes)
        modes.push_back({{"k", vec_json(m.wave_vector)}, {"phase", m.phase}, {"amplitude", m.amplitude}});
    return {{"modes", modes}};
}

}  // namespace

std::unique_ptr<Profile> parse_profile(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("profile: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw FormatError("profile: missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "constant") return std::make_unique<ConstantProfile>(num(j, "n", 1.0), num(j, "c0", 340.0));
        if (kind == "linear_speed")
            return std::make_unique<LinearSpeedProfile>(num(j, "c_origin", 340.0), vec(j, "gradient", {}),
                                                        num(j, "c0", 340.0));
        if (kind == "linear_index_squared")
            return std::make_unique<LinearIndexSquaredProfile>(num(j, "n2_origin", 1.0), vec(j, "gradient", {}),
                                                               num(j, "c0", 1.0));
        if (kind == "stratified") return std::make_unique<StratifiedProfile>(stratified_params(j), fluctuation(j));
        if (kind == "hotspot") {
            HotSpotParams p;
            p.center = vec(j, "center", p.center);
            p.ts = num(j, "ts", p.ts);
            p.t0 = num(j, "t0", p.t0);
            p.d0 = num(j, "d0", p.d0);
            if (j.contains("base")) p.base = stratified_params(j.at("base"));
            if (!(p.ts > 0.0) || !(p.t0 > 0.0) || !(p.d0 > 0.0))
                throw FormatError("profile: hotspot temperatures and d0 must be positive");
            return std::make_unique<HotSpotProfile>(p);
        }
        if (kind == "wind_over_hill") {
            WindOverHillParams p;
            p.u_star = num(j, "u_star", p.u_star);
            p.von_karman = num(j, "von_karman", p.von_karman);
            p.zg = num(j, "zg", p.zg);
            p.hill_height = num(j, "hill_height", p.hill_height);
            p.hill_radius = num(j, "hill_radius", p.hill_radius);
            p.influence_thickness = num(j, "influence_thickness", p.influence_thickness);
            p.z0 = num(j, "z0", p.z0);
            p.hill_apex = vec(j, "hill_apex", p.hill_apex);
            p.c0 = num(j, "c0", p.c0);
            const std::string dir = j.value("direction", std::string("upwind"));
            if (dir == "upwind") p.direction = WindDirection::upwind;
            else if (dir == "downwind") p.direction = WindDirection::downwind;
            else throw FormatError("profile: direction must be upwind or downwind");
            if (!(p.hill_radius > 0.0) || !(p.influence_thickness > 0.0) || !(p.z0 > 0.0))
                throw FormatError("profile: hill_radius, influence_thickness and z0 must be positive");
            return std::make_unique<WindOverHillProfile>(p);
        }
        if (kind == "mirage") {
            MirageParams p;
            p.mu0 = num(j, "mu0", p.mu0);
            p.mu1 = num(j, "mu1", p.mu1);
            p.beta = num(j, "beta", p.beta);
            const std::string type = j.value("type", std::string("inferior"));
            if (type == "inferior") p.kind = MirageKind::inferior;
            else if (type == "superior") p.kind = MirageKind::superior;
            else throw FormatError("profile: mirage type must be inferior or superior");
            return std::make_unique<MirageProfile>(p);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("profile: ") + e.what());
    }
    throw FormatError("profile: unknown kind '" + kind + "'");
}

std::unique_ptr<Profile> read_profile(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_profile(ss.str());
}

std::string profile_to_json(const Profile& profile) {
    json j;
    j["kind"] = std::string(profile.kind());
    if (auto* p = dynamic_cast<const ConstantProfile*>(&profile)) {
        j["n"] = p->index({});
        j["c0"] = p->reference_speed();
    } else if (auto* p = dynamic_cast<const LinearSpeedProfile*>(&profile)) {
        j["c_origin"] = p->c_origin();
        j["gradient"] = vec_json(p->speed_gradient());
        j["c0"] = p->reference_speed();
    } else if (auto* p = dynamic_cast<const LinearIndexSquaredProfile*>(&profile)) {
        j["n2_origin"] = p->n2_origin();
        j["gradient"] = vec_json(p->index_squared_gradient());
        j["c0"] = p->reference_speed();
    } else if (auto* p = dynamic_cast<const StratifiedProfile*>(&profile)) {
        j.update(stratified_json(p->params()));
        if (!p->fluctuation().modes.empty()) j["fluctuation"] = fluctuation_json(p->fluctuation());
    } else if (auto* p = dynamic_cast<const HotSpotProfile*>(&profile)) {
        const auto& q = p->params();
        j["center"] = vec_json(q.center);
        j["ts"] = q.ts;
        j["t0"] = q.t0;
        j["d0"] = q.d0;
        j["base"] = stratified_json(q.base);
    } else if (auto* p = dynamic_cast<const WindOverHillProfile*>(&profile)) {
        const auto& q = p->params();
        j["u_star"] = q.u_star;
        j["von_karman"] = q.von_karman;
        j["zg"] = q.zg;
        j["hill_height"] = q.hill_height;
        j["hill_radius"] = q.hill_radius;
        j["influence_thickness"] = q.influence_thickness;
        j["z0"] = q.z0;
        j["hill_apex"] = vec_json(q.hill_apex);
        j["direction"] = q.direction == WindDirection::upwind ? "upwind" : "downwind";
        j["c0"] = q.c0;
    } else if (auto* p = dynamic_cast<const MirageProfile*>(&profile)) {
        const auto& q = p->params();
        j["mu0"] = q.mu0;
        j["mu1"] = q.mu1;
        j["beta"] = q.beta;
        j["type"] = q.kind == MirageKind::inferior ? "inferior" : "superior";
    } else {
        throw FormatError("profile: cannot serialize kind '" + std::string(profile.kind()) + "'");
    }
    return j.dump(2);
}

}  // namespace curvedray
