#pragma once

#include <vector>

#include "curvedray/media_grid.hpp"

namespace curvedray {

struct ResampleParams {
    double sigma = 0.001;  // variation budget on the relative slowness k = c0/c
    double d_min = 0.0;    // m; 0 selects the smallest grid spacing
    double d_max = 0.0;    // m; 0 selects a quarter of the grid diagonal
};

struct SamplePoint {
    Vec3 position;
    double value = 0.0;    // in the owning mesh's quantity
    double spacing = 0.0;  // local target spacing d(x), m
};

/// Per-grid-point spacing d = sqrt(4 sigma / |grad k|) with k = c0/c, gradients by
/// central differences (one-sided on the border), clamped to [d_min, d_max].
/// Returned values share the grid's layout.
std::vector<double> compute_spacing_field(const MediaGrid& grid, const ResampleParams& p);

/// Resolved clamps after applying the defaults.
double effective_d_min(const MediaGrid& grid, const ResampleParams& p);
double effective_d_max(const MediaGrid& grid, const ResampleParams& p);

struct ResampleStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t gap_seeds = 0;  // sites restarted from grid points left uncovered
};

/// Grow a face-centred-cubic lattice outward from the grid centre. A site
/// is accepted when its nearest grid point and every grid point within d/2
/// are still uncovered and no accepted sample lies closer than min(d, h);
/// acceptance covers those grid points and enqueues the 12 FCC neighbours
/// at distance d. Sites outside the box are clamped onto it, uncovered grid
/// points seed new growth once the queue drains. Sample values are
/// trilinear lookups converted to `quantity`.
std::vector<SamplePoint> resample_fcc(const MediaGrid& grid, const std::vector<double>& spacing,
                                      const ResampleParams& p, Quantity quantity,
                                      ResampleStats* stats = nullptr);

/// Ensure the eight grid-box corners are samples so the convex hull of the
/// set is the whole box. Samples within a quarter grid spacing of a corner
/// are replaced by it.
void add_box_corners(const MediaGrid& grid, const std::vector<double>& spacing, Quantity quantity,
                     std::vector<SamplePoint>& samples);

}  // namespace curvedray
