#include "splintcad/grid2.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "splintcad/parallel.hpp"

namespace splintcad {

Grid2d::Grid2d(int nx, int ny, double x0, double y0, double step, double fill)
    : nx_(nx), ny_(ny), x0_(x0), y0_(y0), step_(step),
      data_(static_cast<size_t>(nx) * ny, fill) {}

Grid2d ball_envelope_down(const Grid2d& bottom, double radius) {
    Grid2d out = bottom;
    if (radius <= 0.0) return out;
    double step = bottom.step();
    int reach = static_cast<int>(std::ceil(radius / step));

    // Precompute (di, dj, vertical drop) stencil once.
    struct Tap {
        int di, dj;
        double drop;
    };
    std::vector<Tap> taps;
    taps.reserve(static_cast<size_t>((2 * reach + 1) * (2 * reach + 1)));
    for (int dj = -reach; dj <= reach; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
            double rho2 = (di * di + dj * dj) * step * step;
            if (rho2 <= radius * radius) {
                taps.push_back({di, dj, std::sqrt(radius * radius - rho2)});
            }
        }
    }

    parallel_for(0, static_cast<size_t>(bottom.ny()), [&](size_t j) {
        for (int i = 0; i < bottom.nx(); ++i) {
            double best = kInf;
            for (const Tap& t : taps) {
                int ii = i + t.di, jj = static_cast<int>(j) + t.dj;
                if (!bottom.in_bounds(ii, jj)) continue;
                double b = bottom.at(ii, jj);
                if (b == kInf) continue;
                best = std::min(best, b - t.drop);
            }
            out.at(i, static_cast<int>(j)) = best;
        }
    });
    return out;
}

namespace {

// 1D squared-distance transform (lower envelope of parabolas).
void dt1d(const std::vector<double>& f, std::vector<double>& d) {
    int n = static_cast<int>(f.size());
    d.assign(static_cast<size_t>(n), 0.0);
    std::vector<int> v(static_cast<size_t>(n));
    std::vector<double> z(static_cast<size_t>(n) + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s;
        for (;;) {
            int p = v[static_cast<size_t>(k)];
            s = ((f[static_cast<size_t>(q)] + q * q) - (f[static_cast<size_t>(p)] + p * p)) /
                (2.0 * q - 2.0 * p);
            if (s <= z[static_cast<size_t>(k)]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[static_cast<size_t>(k)] = q;
        z[static_cast<size_t>(k)] = s;
        z[static_cast<size_t>(k) + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<size_t>(k) + 1] < q) ++k;
        int p = v[static_cast<size_t>(k)];
        d[static_cast<size_t>(q)] = (q - p) * (double)(q - p) + f[static_cast<size_t>(p)];
    }
}

// Squared distance (in cells) to the nearest seed cell.
std::vector<double> edt_sq(const std::vector<char>& seed, int nx, int ny) {
    std::vector<double> grid(static_cast<size_t>(nx) * ny);
    for (size_t i = 0; i < grid.size(); ++i) grid[i] = seed[i] ? 0.0 : kInf;

    std::vector<double> col(static_cast<size_t>(ny)), out_col;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) col[static_cast<size_t>(j)] = grid[static_cast<size_t>(j) * nx + i];
        dt1d(col, out_col);
        for (int j = 0; j < ny; ++j) grid[static_cast<size_t>(j) * nx + i] = out_col[static_cast<size_t>(j)];
    }
    std::vector<double> row(static_cast<size_t>(nx)), out_row;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) row[static_cast<size_t>(i)] = grid[static_cast<size_t>(j) * nx + i];
        dt1d(row, out_row);
        for (int i = 0; i < nx; ++i) grid[static_cast<size_t>(j) * nx + i] = out_row[static_cast<size_t>(i)];
    }
    return grid;
}

}  // namespace

Grid2d signed_distance_2d(const std::vector<char>& mask, const Grid2d& like) {
    int nx = like.nx(), ny = like.ny();
    std::vector<char> inv(mask.size());
    for (size_t i = 0; i < mask.size(); ++i) inv[i] = mask[i] ? 0 : 1;
    std::vector<double> d_in = edt_sq(mask, nx, ny);   // distance to material
    std::vector<double> d_out = edt_sq(inv, nx, ny);   // distance to empty
    Grid2d out = like;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            size_t idx = static_cast<size_t>(j) * nx + i;
            double v = mask[idx] ? -std::sqrt(d_out[idx]) : std::sqrt(d_in[idx]);
            out.at(i, j) = v * like.step();
        }
    }
    return out;
}

int label_components(const std::vector<char>& mask, int nx, int ny,
                     std::vector<int32_t>& labels) {
    labels.assign(mask.size(), -1);
    int next = 0;
    std::vector<size_t> stack;
    for (size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || labels[start] >= 0) continue;
        stack.push_back(start);
        labels[start] = next;
        while (!stack.empty()) {
            size_t cur = stack.back();
            stack.pop_back();
            int i = static_cast<int>(cur % static_cast<size_t>(nx));
            int j = static_cast<int>(cur / static_cast<size_t>(nx));
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                int ii = i + di[k], jj = j + dj[k];
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
                size_t nidx = static_cast<size_t>(jj) * nx + ii;
                if (mask[nidx] && labels[nidx] < 0) {
                    labels[nidx] = next;
                    stack.push_back(nidx);
                }
            }
        }
        ++next;
    }
    return next;
}

std::vector<Polyline> mask_boundary_loops(const std::vector<char>& mask, const Grid2d& like,
                                          double z) {
    // Collect directed boundary edges (mask cell on the left), then chain.
    int nx = like.nx(), ny = like.ny();
    auto is_set = [&](int i, int j) {
        if (i < 0 || i >= nx || j < 0 || j >= ny) return false;
        return mask[static_cast<size_t>(j) * nx + i] != 0;
    };
    // Edge endpoints live on cell-corner lattice (i-1/2 offsets).
    auto corner = [&](int i, int j) {
        return Vec3(like.x_at(i) - like.step() / 2, like.y_at(j) - like.step() / 2, z);
    };

    std::map<std::pair<int, int>, std::pair<int, int>> next_corner;  // directed edges
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!is_set(i, j)) continue;
            // For each of the 4 sides lacking a neighbour, add a directed edge
            // (counter-clockwise around the mask region).
            if (!is_set(i, j - 1)) next_corner[{i, j}] = {i + 1, j};          // bottom
            if (!is_set(i + 1, j)) next_corner[{i + 1, j}] = {i + 1, j + 1};  // right
            if (!is_set(i, j + 1)) next_corner[{i + 1, j + 1}] = {i, j + 1};  // top
            if (!is_set(i - 1, j)) next_corner[{i, j + 1}] = {i, j};          // left
        }
    }

    std::vector<Polyline> loops;
    while (!next_corner.empty()) {
        auto begin = next_corner.begin();
        std::pair<int, int> start = begin->first;
        Polyline loop;
        loop.closed = true;
        std::pair<int, int> cur = start;
        do {
            loop.points.push_back(corner(cur.first, cur.second));
            auto it = next_corner.find(cur);
            if (it == next_corner.end()) break;  // open chain; defensive
            std::pair<int, int> nxt = it->second;
            next_corner.erase(it);
            cur = nxt;
        } while (cur != start);
        loops.push_back(std::move(loop));
    }
    return loops;
}

}  // namespace splintcad
