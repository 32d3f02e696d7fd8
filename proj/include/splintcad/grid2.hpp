#pragma once

#include <cstdint>
#include <vector>

#include "splintcad/queries.hpp"

namespace splintcad {

// Regular 2D scalar grid over the build frame's xy plane.
class Grid2d {
public:
    Grid2d() = default;
    Grid2d(int nx, int ny, double x0, double y0, double step, double fill);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double step() const { return step_; }
    double x_at(int i) const { return x0_ + step_ * i; }
    double y_at(int j) const { return y0_ + step_ * j; }

    double& at(int i, int j) { return data_[static_cast<size_t>(j) * nx_ + i]; }
    double at(int i, int j) const { return data_[static_cast<size_t>(j) * nx_ + i]; }
    bool in_bounds(int i, int j) const { return i >= 0 && i < nx_ && j >= 0 && j < ny_; }

    size_t cell_count() const { return data_.size(); }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int nx_ = 0, ny_ = 0;
    double x0_ = 0, y0_ = 0, step_ = 1;
    std::vector<double> data_;
};

// Lower envelope of the epigraph {z >= B} dilated by a ball of radius w:
// out(x,y) = min over columns within w of (B - sqrt(w^2 - rho^2)).
Grid2d ball_envelope_down(const Grid2d& bottom, double radius);

// Exact 2D signed Euclidean distance to the mask boundary, sampled at column
// centres: positive outside the mask, negative inside (Felzenszwalb/
// Huttenlocher separable transform).
Grid2d signed_distance_2d(const std::vector<char>& mask, const Grid2d& like);

// 4-connected components of a mask; returns label per cell (-1 outside) and
// the component count. Labels are assigned in scan order (deterministic).
int label_components(const std::vector<char>& mask, int nx, int ny,
                     std::vector<int32_t>& labels);

// Boundary loops of a mask as axis-aligned polylines at cell-edge midlines,
// in grid coordinates (z = 0), one closed loop per boundary contour.
std::vector<Polyline> mask_boundary_loops(const std::vector<char>& mask, const Grid2d& like,
                                          double z);

}  // namespace splintcad
