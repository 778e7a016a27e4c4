#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "curvedray/analysis.hpp"
#include "curvedray/error.hpp"
#include "curvedray/gradient.hpp"
#include "curvedray/mesh_io.hpp"
#include "curvedray/path_io.hpp"
#include "curvedray/profile_io.hpp"
#include "curvedray/reference_stepper.hpp"
#include "curvedray/scenarios.hpp"
#include "json.hpp"

namespace curvedray::cli {

namespace {

using nlohmann::json;

struct ProfileOpts {
    std::string kind;
    std::string file;
    std::uint64_t seed = 1;

    void add(CLI::App* app) {
        app->add_option("--kind", kind, "Profile preset (" + [] {
            std::string s;
            for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
            return s;
        }() + ")");
        app->add_option("--profile", file, "Profile description file (JSON)");
        app->add_option("--seed", seed, "Seed for random fluctuation modes");
    }
    bool given() const { return !kind.empty() || !file.empty(); }
    std::unique_ptr<Profile> load() const {
        if (!kind.empty() && !file.empty()) throw CLI::ValidationError("--kind and --profile are exclusive");
        if (!file.empty()) return read_profile(file);
        if (kind.empty()) throw CLI::ValidationError("one of --kind or --profile is required");
        return preset_profile(kind, seed);
    }
};

struct SceneOpts {
    std::string file;
    bool no_ground = false;
    bool absorbing_ground = false;

    void add(CLI::App* app) {
        app->add_option("--scene", file, "Scene triangle file; replaces the default ground plane");
        app->add_flag("--no-ground", no_ground, "Do not add a ground plane at the bottom of the box");
        app->add_flag("--absorbing-ground", absorbing_ground, "Make the default ground plane absorbing");
    }
    BoundaryScene load(const Box3& box) const {
        if (!file.empty()) return read_scene(file);
        if (no_ground) return {};
        return make_ground_plane(box, box.lo.z, 0, !absorbing_ground);
    }
};

struct LaunchOpts {
    std::vector<double> origin;
    std::vector<double> direction;
    int fan = 0;
    int sphere = 0;
    double elev_min = -45.0, elev_max = 45.0, azimuth = 0.0;

    void add(CLI::App* app) {
        app->add_option("--origin", origin, "Source position x y z (default: box centre, 10 m up)")->expected(3);
        app->add_option("--direction", direction, "Single launch direction x y z")->expected(3);
        app->add_option("--fan", fan, "Number of rays in an elevation fan");
        app->add_option("--sphere", sphere, "Number of rays spread over the sphere");
        app->add_option("--elev-min", elev_min, "Lowest fan elevation, degrees");
        app->add_option("--elev-max", elev_max, "Highest fan elevation, degrees");
        app->add_option("--azimuth", azimuth, "Fan azimuth about z, degrees");
    }
    Vec3 source(const Box3& box) const {
        if (origin.size() == 3) return {origin[0], origin[1], origin[2]};
        const Vec3 c = box.center();
        const double h = box.hi.z - box.lo.z;
        return {c.x, c.y, box.lo.z + std::min(10.0, 0.5 * h)};
    }
    std::vector<Vec3> directions(int default_fan = 9) const {
        const int picked = (direction.size() == 3) + (fan > 0) + (sphere > 0);
        if (picked > 1) throw CLI::ValidationError("choose one of --direction, --fan, --sphere");
        if (direction.size() == 3) {
            const Vec3 d{direction[0], direction[1], direction[2]};
            if (norm(d) == 0.0) throw CLI::ValidationError("--direction must be non-zero");
            return {normalized(d)};
        }
        if (sphere > 0) return sphere_fan(sphere);
        const int n = fan > 0 ? fan : default_fan;
        const double deg = std::numbers::pi / 180.0;
        std::vector<double> elev;
        for (int i = 0; i < n; ++i)
            elev.push_back(deg * (n == 1 ? 0.5 * (elev_min + elev_max) : elev_min + (elev_max - elev_min) * i / (n - 1)));
        return elevation_fan(elev, azimuth * deg);
    }
};

struct TraceOpts {
    int depth = 3;
    double max_travel = std::numeric_limits<double>::infinity();
    std::size_t max_cells = 1'000'000;
    double epsilon_exit = 1e-9;

    void add(CLI::App* app) {
        app->add_option("--depth", depth, "Maximum number of reflections");
        app->add_option("--max-travel", max_travel, "Stop after this path length, m");
        app->add_option("--max-cells", max_cells, "Cell (or step) budget per ray");
        app->add_option("--epsilon-exit", epsilon_exit, "Exit tolerance as a fraction of the cell diameter");
    }
    TraceConfig config() const {
        TraceConfig c;
        c.max_reflections = depth;
        c.max_travel = max_travel;
        c.max_cells = max_cells;
        c.epsilon_exit = epsilon_exit;
        return c;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os || !(os << text)) throw IoError("cannot write '" + path + "'");
}

json termination_counts(const std::vector<PropagationPath>& paths) {
    std::map<std::string, int> counts;
    for (const auto& p : paths) counts[std::string(termination_name(p.termination))]++;
    return counts;
}

json path_summary(const std::vector<PropagationPath>& paths) {
    double travel = 0.0;
    std::size_t segments = 0, events = 0, nudges = 0, failed = 0;
    for (const auto& p : paths) {
        travel += p.total_travel;
        segments += p.segments.size();
        events += p.events.size();
        nudges += p.nudges;
        if (!p.diagnostic.empty()) ++failed;
    }
    const double n = paths.empty() ? 1.0 : static_cast<double>(paths.size());
    return {{"rays", paths.size()},
            {"terminations", termination_counts(paths)},
            {"mean_travel", travel / n},
            {"mean_segments", static_cast<double>(segments) / n},
            {"events", events},
            {"nudges", nudges},
            {"diagnostics", failed}};
}

void emit(std::ostream& out, bool dump_json, const json& j, const std::string& text) {
    if (dump_json)
        out << j.dump(2) << '\n';
    else
        out << text;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError("bad number '" + item + "' in list");
        }
    }
    return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Curved-ray tracing through adaptive tetrahedral media meshes", "curvedray"};
    app.set_config("--config", "", "Read flags from an INI/TOML file; flags on the command line win");
    app.require_subcommand(1);
    bool dump_json = false;
    auto json_flag = [&](CLI::App* sub) {
        sub->add_flag("--dump-json", dump_json, "Print a JSON summary instead of text");
    };

    // bake-profile
    auto* bake = app.add_subcommand("bake-profile", "Sample an analytic profile onto a regular grid");
    ProfileOpts bake_prof;
    bake_prof.add(bake);
    std::vector<int> bake_dims{64};
    double bake_spacing = 1.25;
    std::vector<double> bake_origin{0.0, 0.0, 0.0};
    std::string bake_q = "c", bake_enc = "binary", bake_out, bake_profile_out;
    bake->add_option("--dims", bake_dims, "Grid points per axis (one value or three)")->expected(1, 3);
    bake->add_option("--spacing", bake_spacing, "Grid spacing, m");
    bake->add_option("--origin", bake_origin, "Grid origin x y z")->expected(3);
    bake->add_option("--quantity", bake_q, "Stored quantity")->check(CLI::IsMember({"c", "n", "n2"}));
    bake->add_option("--encoding", bake_enc, "Value encoding")->check(CLI::IsMember({"binary", "text"}));
    bake->add_option("--out", bake_out, "Output grid file")->required();
    bake->add_option("--write-profile", bake_profile_out, "Also write the profile description (JSON)");
    json_flag(bake);

    // build-mesh
    auto* build = app.add_subcommand("build-mesh", "Resample a grid, tetrahedralize and bake gradients");
    std::string build_grid = "g.grid", build_out = "mesh.crmesh", build_q = "c", build_grad = "regression";
    ResampleParams build_rp;
    SceneOpts build_scene;
    build->add_option("--grid", build_grid, "Input grid file");
    build->add_option("--out", build_out, "Output mesh cache");
    build->add_option("--sigma", build_rp.sigma, "Variation budget on the relative slowness");
    build->add_option("--d-min", build_rp.d_min, "Smallest sample spacing, m (0: grid spacing)");
    build->add_option("--d-max", build_rp.d_max, "Largest sample spacing, m (0: quarter diagonal)");
    build->add_option("--quantity", build_q, "Mesh quantity: c gives circular arcs, n2 parabolas")
        ->check(CLI::IsMember({"c", "n2"}));
    build->add_option("--gradient", build_grad, "Cell gradient estimator")
        ->check(CLI::IsMember({"regression", "green-gauss", "none"}));
    build_scene.add(build);
    json_flag(build);

    // trace
    auto* tr = app.add_subcommand("trace", "Trace curved rays through a mesh");
    std::string tr_mesh = "mesh.crmesh", tr_out = "paths.csv", tr_format;
    int tr_samples = 4;
    bool tr_linear = false;
    LaunchOpts tr_launch;
    TraceOpts tr_opts;
    tr->add_option("--mesh", tr_mesh, "Mesh cache");
    tr->add_option("--out", tr_out, "Path output (.csv, .json or binary)");
    tr->add_option("--format", tr_format, "Force the output format")->check(CLI::IsMember({"csv", "json", "binary"}));
    tr->add_option("--samples", tr_samples, "Interior points sampled per segment");
    tr->add_flag("--linear", tr_linear, "Ignore gradients and trace straight rays");
    tr_launch.add(tr);
    tr_opts.add(tr);
    json_flag(tr);

    // step-trace
    auto* st = app.add_subcommand("step-trace", "Integrate the ray equation with Euler or RK4 steps");
    std::string st_grid, st_mesh, st_media, st_out = "paths_step.csv", st_format, st_integ = "rk4";
    double st_ds = 0.1, st_converge = 0.0;
    int st_samples = 0;
    ProfileOpts st_prof;
    SceneOpts st_scene;
    LaunchOpts st_launch;
    TraceOpts st_opts;
    st_opts.max_cells = 100'000'000;
    st->add_option("--grid", st_grid, "Grid file: media box, and media for --media grid");
    st->add_option("--mesh", st_mesh, "Mesh cache: media box, and media for --media mesh");
    st->add_option("--media", st_media, "Media source (default: analytic when a profile is given)")
        ->check(CLI::IsMember({"analytic", "grid", "mesh"}));
    st_prof.add(st);
    st->add_option("--ds", st_ds, "Step size, m");
    st->add_option("--integrator", st_integ, "Integrator")->check(CLI::IsMember({"euler", "rk4"}));
    st->add_option("--converge", st_converge, "Halve ds until endpoints move less than this, m");
    st->add_option("--out", st_out, "Path output (.csv, .json or binary)");
    st->add_option("--format", st_format, "Force the output format")->check(CLI::IsMember({"csv", "json", "binary"}));
    st->add_option("--samples", st_samples, "Interior points per step segment");
    st_scene.add(st);
    st_launch.add(st);
    st_opts.add(st);
    json_flag(st);

    // analyze
    auto* an = app.add_subcommand("analyze", "Interpolation and ray error analysis");
    bool an_interp = false, an_ray = false;
    std::string an_grid = "g.grid", an_mesh, an_sigmas = "0.004,0.002,0.001,0.0005", an_paths, an_truth, an_csv;
    std::string an_q = "c";
    an->add_flag("--interp-error", an_interp, "Interpolation error of meshes against the grid");
    an->add_flag("--ray-error", an_ray, "Endpoint and travel errors of --paths against --truth");
    an->add_option("--grid", an_grid, "Reference grid");
    an->add_option("--mesh", an_mesh, "Evaluate this mesh instead of a sigma sweep");
    an->add_option("--sigmas", an_sigmas, "Comma-separated sigma sweep");
    an->add_option("--quantity", an_q, "Mesh quantity for the sweep")->check(CLI::IsMember({"c", "n2"}));
    an->add_option("--paths", an_paths, "Traced paths");
    an->add_option("--truth", an_truth, "Reference paths with the same launch directions");
    an->add_option("--out-csv", an_csv, "Write the table as CSV");
    json_flag(an);

    // bench
    auto* bn = app.add_subcommand("bench", "Curved tracer vs equal-accuracy stepping, single-threaded");
    std::string bn_grid = "g.grid", bn_mesh, bn_media = "analytic", bn_integ = "euler", bn_json, bn_csv;
    double bn_sigma = 0.001, bn_ds0 = 4.0, bn_tol = 1e-6, bn_min_s = 0.2;
    int bn_rays = 100;
    ProfileOpts bn_prof;
    SceneOpts bn_scene;
    LaunchOpts bn_launch;
    TraceOpts bn_opts;
    bn->add_option("--grid", bn_grid, "Grid baked from the profile");
    bn->add_option("--mesh", bn_mesh, "Mesh cache (default: build from --grid)");
    bn->add_option("--sigma", bn_sigma, "Sigma when building the mesh");
    bn_prof.add(bn);
    bn->add_option("--media", bn_media, "Stepper media source")->check(CLI::IsMember({"analytic", "grid", "mesh"}));
    bn->add_option("--integrator", bn_integ, "Stepper integrator")->check(CLI::IsMember({"euler", "rk4"}));
    bn->add_option("--ds0", bn_ds0, "First step size of the accuracy sweep, m");
    bn->add_option("--truth-tol", bn_tol, "Convergence tolerance of the RK4 reference, m");
    bn->add_option("--rays", bn_rays, "Rays on the sphere when no launch option is given");
    bn->add_option("--min-seconds", bn_min_s, "Minimum wall time per timed measurement");
    bn->add_option("--out-json", bn_json, "Write the report as JSON");
    bn->add_option("--out-csv", bn_csv, "Write the breakdown row as CSV");
    bn_scene.add(bn);
    bn_launch.add(bn);
    bn_opts.add(bn);
    json_flag(bn);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*bake) {
            auto profile = bake_prof.load();
            std::array<int, 3> dims{};
            if (bake_dims.size() == 1)
                dims = {bake_dims[0], bake_dims[0], bake_dims[0]};
            else if (bake_dims.size() == 3)
                dims = {bake_dims[0], bake_dims[1], bake_dims[2]};
            else
                throw CLI::ValidationError("--dims takes one or three values");
            if (dims[0] < 2 || dims[1] < 2 || dims[2] < 2) throw CLI::ValidationError("--dims must be at least 2");
            if (!(bake_spacing > 0.0)) throw CLI::ValidationError("--spacing must be positive");
            const MediaGrid g = bake_grid(*profile, dims, {bake_origin[0], bake_origin[1], bake_origin[2]},
                                          {bake_spacing, bake_spacing, bake_spacing}, parse_quantity(bake_q));
            write_grid(g, bake_out, bake_enc == "text" ? GridEncoding::text : GridEncoding::binary);
            if (!bake_profile_out.empty()) write_text(bake_profile_out, profile_to_json(*profile) + "\n");
            const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
            json j = {{"grid", bake_out},     {"profile", std::string(profile->kind())},
                      {"dims", g.dims},       {"spacing", bake_spacing},
                      {"quantity", bake_q},   {"min", *lo},
                      {"max", *hi},           {"points", g.size()}};
            std::ostringstream t;
            t << "wrote " << bake_out << ": " << g.dims[0] << "x" << g.dims[1] << "x" << g.dims[2] << " " << bake_q
              << " in [" << *lo << ", " << *hi << "]\n";
            emit(out, dump_json, j, t.str());
            return kOk;
        }

        if (*build) {
            const MediaGrid g = read_grid(build_grid);
            MeshBuildReport rep;
            AdaptiveMesh mesh = build_adaptive_mesh(g, build_rp, parse_quantity(build_q), &rep);
            const GradientMethod gm = parse_gradient_method(build_grad);
            if (gm != GradientMethod::none) bake_gradients(mesh, gm);
            const BoundaryScene scene = build_scene.load(g.bounds());
            std::size_t ignored = 0;
            if (!scene.empty()) ignored = link_boundary(mesh, scene);
            write_mesh(mesh, build_out);
            std::size_t fallback = 0;
            for (const auto& cg : mesh.gradients) fallback += cg.fallback;
            json j = {{"mesh", build_out},
                      {"grid_points", g.size()},
                      {"vertices", rep.vertices},
                      {"tets", rep.tets},
                      {"reduction", static_cast<double>(g.size()) / static_cast<double>(rep.vertices)},
                      {"accepted", rep.resample.accepted},
                      {"rejected", rep.resample.rejected},
                      {"gap_seeds", rep.resample.gap_seeds},
                      {"d_min", rep.d_min},
                      {"d_max", rep.d_max},
                      {"max_radius_edge", rep.max_radius_edge},
                      {"sigma", build_rp.sigma},
                      {"gradient", build_grad},
                      {"gradient_fallbacks", fallback},
                      {"scene_triangles", scene.triangles.size()},
                      {"ignored_triangles", ignored}};
            std::ostringstream t;
            t << "wrote " << build_out << ": " << rep.vertices << " vertices, " << rep.tets << " tets (sigma "
              << build_rp.sigma << ", " << g.size() << " grid points)\n";
            emit(out, dump_json, j, t.str());
            return kOk;
        }

        if (*tr) {
            const AdaptiveMesh mesh = read_mesh(tr_mesh);
            TraceConfig cfg = tr_opts.config();
            cfg.force_linear = tr_linear;
            const Vec3 src = tr_launch.source(mesh.bounds());
            const auto dirs = tr_launch.directions();
            const auto paths = trace_fan(mesh, src, dirs, cfg);
            const PathFormat fmt = tr_format.empty() ? path_format_for(tr_out) : parse_path_format(tr_format);
            write_paths(make_path_set(paths, "curved", tr_samples), tr_out, fmt);
            json j = path_summary(paths);
            j["out"] = tr_out;
            j["origin"] = {src.x, src.y, src.z};
            std::ostringstream t;
            t << "traced " << paths.size() << " rays from (" << src.x << ", " << src.y << ", " << src.z << ") -> "
              << tr_out << "\n";
            emit(out, dump_json, j, t.str());
            return kOk;
        }

        if (*st) {
            std::unique_ptr<Profile> profile;
            if (st_prof.given()) profile = st_prof.load();
            std::optional<MediaGrid> grid;
            std::optional<AdaptiveMesh> mesh;
            if (!st_grid.empty()) grid = read_grid(st_grid);
            if (!st_mesh.empty()) mesh = read_mesh(st_mesh);
            std::string media = st_media.empty() ? (profile ? "analytic" : grid ? "grid" : "mesh") : st_media;
            Box3 box;
            if (grid)
                box = grid->bounds();
            else if (mesh)
                box = mesh->bounds();
            else
                throw CLI::ValidationError("step-trace needs --grid or --mesh to define the media box");
            std::unique_ptr<MediaSource> source;
            if (media == "analytic") {
                if (!profile) throw CLI::ValidationError("--media analytic needs --kind or --profile");
                source = std::make_unique<ProfileMedia>(*profile, box);
            } else if (media == "grid") {
                if (!grid) throw CLI::ValidationError("--media grid needs --grid");
                source = std::make_unique<GridMedia>(*grid);
            } else {
                if (!mesh) throw CLI::ValidationError("--media mesh needs --mesh");
                source = std::make_unique<MeshMedia>(*mesh);
            }
            const BoundaryScene scene = st_scene.load(box);
            StepperConfig sc;
            sc.step_size = st_ds;
            sc.integrator = parse_integrator(st_integ);
            sc.limits = st_opts.config();
            const Vec3 src = st_launch.source(box);
            const auto dirs = st_launch.directions();
            std::vector<PropagationPath> paths;
            for (const Vec3& d : dirs) {
                if (st_converge > 0.0)
                    paths.push_back(converged_trace(*source, scene, src, d, st_converge, sc));
                else
                    paths.push_back(step_trace(*source, scene, src, d, sc));
            }
            const PathFormat fmt = st_format.empty() ? path_format_for(st_out) : parse_path_format(st_format);
            write_paths(make_path_set(paths, st_integ, st_samples), st_out, fmt);
            json j = path_summary(paths);
            j["out"] = st_out;
            j["media"] = media;
            j["integrator"] = st_integ;
            j["step_size"] = st_ds;
            std::ostringstream t;
            t << "stepped " << paths.size() << " rays (" << st_integ << ", ds " << st_ds << ", " << media
              << " media) -> " << st_out << "\n";
            emit(out, dump_json, j, t.str());
            return kOk;
        }

        if (*an) {
            if (an_interp == an_ray) throw CLI::ValidationError("choose exactly one of --interp-error, --ray-error");
            if (an_ray) {
                if (an_paths.empty() || an_truth.empty()) throw CLI::ValidationError("--ray-error needs --paths and --truth");
                const auto a = summary_paths(read_paths(an_paths));
                const auto b = summary_paths(read_paths(an_truth));
                const RayErrorReport r = ray_error(a, b);
                if (!an_csv.empty()) {
                    std::ostringstream c;
                    c.precision(12);
                    c << "ray,hit_error,travel_error,relative_hit_error,relative_travel_error\n";
                    for (std::size_t i = 0; i < r.ray_count; ++i)
                        c << i << ',' << r.hit_error[i] << ',' << r.travel_error[i] << ',' << r.relative_hit_error[i]
                          << ',' << r.relative_travel_error[i] << '\n';
                    write_text(an_csv, c.str());
                }
                std::ostringstream t;
                t << "rays " << r.ray_count << ", mean hit error " << r.mean_hit_error() << " m, mean relative travel error "
                  << r.mean_relative_travel_error() << ", within 1e-3: " << r.fraction_within(1e-3) << "\n";
                if (dump_json)
                    out << to_json(r) << '\n';
                else
                    out << t.str();
                return kOk;
            }
            const MediaGrid g = read_grid(an_grid);
            std::vector<InterpolationErrorReport> rows;
            if (!an_mesh.empty()) {
                rows.push_back(interpolation_error(g, read_mesh(an_mesh)));
            } else {
                for (double s : parse_list(an_sigmas)) {
                    ResampleParams rp;
                    rp.sigma = s;
                    rows.push_back(interpolation_error(g, build_adaptive_mesh(g, rp, parse_quantity(an_q)), s));
                }
            }
            std::ostringstream table;
            table.precision(9);
            table << "sigma,samples,grid_points,reduction,e_rel,max_abs,outside\n";
            json arr = json::array();
            for (const auto& r : rows) {
                const double red = static_cast<double>(r.grid_points) / static_cast<double>(r.samples);
                table << (std::isfinite(r.sigma) ? std::to_string(r.sigma) : std::string()) << ',' << r.samples << ','
                      << r.grid_points << ',' << red << ',' << r.e_rel << ',' << r.max_abs << ',' << r.outside << '\n';
                arr.push_back(json::parse(to_json(r)));
            }
            if (!an_csv.empty()) write_text(an_csv, table.str());
            emit(out, dump_json, arr, table.str());
            return kOk;
        }

        if (*bn) {
            const MediaGrid g = read_grid(bn_grid);
            auto profile = bn_prof.load();
            const BoundaryScene scene = bn_scene.load(g.bounds());
            AdaptiveMesh mesh;
            if (!bn_mesh.empty()) {
                mesh = read_mesh(bn_mesh);
            } else {
                mesh = build_mesh(g, scene, bn_sigma, GradientMethod::regression, Quantity::speed);
            }
            const bool launch_given = bn_launch.fan > 0 || bn_launch.sphere > 0 || bn_launch.direction.size() == 3;
            const auto dirs = launch_given ? bn_launch.directions() : sphere_fan(bn_rays);
            const Vec3 src = bn_launch.source(g.bounds());
            ProfileMedia truth_media(*profile, g.bounds());
            StepperConfig rc;
            rc.step_size = 1.0;
            rc.integrator = Integrator::rk4;
            rc.limits = bn_opts.config();
            rc.limits.max_cells = std::numeric_limits<std::size_t>::max();
            rc.record_polyline = false;
            const auto truth = reference_paths(truth_media, mesh.scene, src, dirs, bn_tol, rc);
            std::unique_ptr<MediaSource> stepper_media;
            if (bn_media == "analytic")
                stepper_media = std::make_unique<ProfileMedia>(*profile, g.bounds());
            else if (bn_media == "grid")
                stepper_media = std::make_unique<GridMedia>(g);
            else
                stepper_media = std::make_unique<MeshMedia>(mesh);
            BenchConfig bc;
            bc.trace = bn_opts.config();
            bc.stepper_ds0 = bn_ds0;
            bc.integrator = parse_integrator(bn_integ);
            bc.min_seconds = bn_min_s;
            const BenchReport r = benchmark(mesh, *stepper_media, src, dirs, truth, bc);
            if (!bn_json.empty()) write_text(bn_json, to_json(r) + "\n");
            if (!bn_csv.empty()) write_text(bn_csv, to_csv(r));
            std::ostringstream t;
            t << "rays " << r.rays << ", cells/ray " << r.mean_cells_per_ray << ", curved " << r.curved_seconds
              << " s (error " << r.curved_error << " m), " << r.integrator << " ds " << r.stepper_ds << " "
              << r.stepper_seconds << " s (error " << r.stepper_error << " m), speedup " << r.speedup
              << ", curve phase " << 100.0 * r.curve_fraction() << "%\n";
            if (dump_json)
                out << to_json(r) << '\n';
            else
                out << t.str();
            return kOk;
        }
    } catch (const CLI::ValidationError& e) {
        err << "curvedray: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "curvedray: " << e.what() << '\n';
        return kMissingFile;
    } catch (const VersionError& e) {
        err << "curvedray: " << e.what() << '\n';
        return kVersion;
    } catch (const FormatError& e) {
        err << "curvedray: " << e.what() << '\n';
        return kFormat;
    } catch (const Error& e) {
        err << "curvedray: " << e.what() << '\n';
        return kModule;
    } catch (const std::exception& e) {
        err << "curvedray: internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace curvedray::cli
