#pragma once

#include <memory>
#include <vector>

#include "curvedray/adaptive_mesh.hpp"
#include "curvedray/media_grid.hpp"
#include "curvedray/media_profiles.hpp"
#include "curvedray/traversal.hpp"

namespace curvedray {

/// Relative index n and its gradient over a box.
class MediaSource {
public:
    virtual ~MediaSource() = default;
    virtual double index(const Vec3& x) const = 0;
    virtual Vec3 index_gradient(const Vec3& x) const = 0;
    virtual const Box3& bounds() const = 0;
};

/// Analytic profile; queries are clamped into the box.
class ProfileMedia final : public MediaSource {
public:
    ProfileMedia(const Profile& profile, const Box3& box) : profile_(profile), box_(box) {}
    double index(const Vec3& x) const override;
    Vec3 index_gradient(const Vec3& x) const override;
    const Box3& bounds() const override { return box_; }

private:
    const Profile& profile_;
    Box3 box_;
    Vec3 clamp(const Vec3& x) const;
};

/// Trilinear interpolation of a grid converted to n; the gradient is the
/// exact derivative of the trilinear interpolant.
class GridMedia final : public MediaSource {
public:
    explicit GridMedia(const MediaGrid& grid);
    double index(const Vec3& x) const override;
    Vec3 index_gradient(const Vec3& x) const override;
    const Box3& bounds() const override { return box_; }

private:
    MediaGrid n_;
    Box3 box_;
};

/// Barycentric media of a mesh with its baked cell gradients converted to n.
/// Keeps a location hint, so one instance must not be shared between threads.
class MeshMedia final : public MediaSource {
public:
    explicit MeshMedia(const AdaptiveMesh& mesh);
    double index(const Vec3& x) const override;
    Vec3 index_gradient(const Vec3& x) const override;
    const Box3& bounds() const override { return mesh_.bounds(); }

private:
    const AdaptiveMesh& mesh_;
    mutable int hint_ = -1;
    int cell(const Vec3& x) const;
};

enum class Integrator { euler, rk4 };

std::string_view integrator_name(Integrator i);
Integrator parse_integrator(std::string_view name);

struct StepperConfig {
    double step_size = 0.1;  // m
    Integrator integrator = Integrator::rk4;
    TraceConfig limits;      // max_cells bounds the number of steps
    bool record_polyline = true;
};

/// Integrate dx/ds = p / n, dp/ds = grad n. Every step's chord is tested
/// against the scene triangles and the media box; the first hit reflects or
/// terminates the ray. With record_polyline each chord becomes a linear
/// segment of the path; otherwise only events and the endpoint are kept.
PropagationPath step_trace(const MediaSource& media, const BoundaryScene& scene, const Vec3& origin,
                           const Vec3& direction, const StepperConfig& cfg);

struct ConvergenceStep {
    double step_size = 0.0;
    Vec3 end_point;
    double total_travel = 0.0;
    double change = 0.0;  // endpoint distance to the previous run
};

/// Halve the step size from `cfg.step_size` until successive endpoints differ
/// by less than `tol`; returns the last run. Throws ConvergenceError after
/// `max_halvings` halvings.
PropagationPath converged_trace(const MediaSource& media, const BoundaryScene& scene, const Vec3& origin,
                                const Vec3& direction, double tol, StepperConfig cfg, int max_halvings = 16,
                                std::vector<ConvergenceStep>* history = nullptr);

}  // namespace curvedray
