#ifndef HYPERDISP_GRID_HPP
#define HYPERDISP_GRID_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hyperdisp {

/// Regular frequency grid. Cartesian axes sample xi_i = min + k*(max-min)/count
/// for k in [0, count) (max excluded, FFT-compatible). The optional polar mode
/// samples radius x direction on S^{n-1} (n = 2 or 3); node order is
/// direction-major so a sweep walks each ray outward.
struct FrequencyGrid {
    struct Axis {
        double min = 0.0, max = 0.0;
        int count = 0;
        double step() const { return (max - min) / count; }
    };

    std::vector<Axis> axes;  // cartesian mode: one per dimension
    bool polar = false;
    Axis radial;             // polar mode
    int directions = 0;      // polar mode: samples on S^{n-1} (n=2: uniform angles)
    int dim = 0;

    static FrequencyGrid cartesian(std::vector<Axis> ax) {
        FrequencyGrid g;
        g.dim = static_cast<int>(ax.size());
        g.axes = std::move(ax);
        for (const auto& a : g.axes) {
            if (a.count < 2) throw std::invalid_argument("FrequencyGrid: count must be >= 2");
            if (!(a.max > a.min)) throw std::invalid_argument("FrequencyGrid: max must exceed min");
        }
        return g;
    }
    static FrequencyGrid symmetric(int dim, double radius, int count) {
        std::vector<Axis> ax(dim, Axis{-radius, radius, count});
        return cartesian(std::move(ax));
    }
    static FrequencyGrid polar2d(double rmin, double rmax, int rcount, int dirs) {
        FrequencyGrid g;
        g.dim = 2;
        g.polar = true;
        g.radial = Axis{rmin, rmax, rcount};
        g.directions = dirs;
        if (rcount < 2 || dirs < 4) throw std::invalid_argument("FrequencyGrid: polar sampling too coarse");
        if (!(rmax > rmin)) throw std::invalid_argument("FrequencyGrid: max must exceed min");
        return g;
    }

    std::int64_t node_count() const {
        if (polar) return static_cast<std::int64_t>(radial.count) * directions;
        std::int64_t c = 1;
        for (const auto& a : axes) c *= a.count;
        return c;
    }

    /// Node -> frequency point. Cartesian nodes are row-major with the last
    /// axis fastest; polar nodes are (direction, radius) with radius fastest.
    std::vector<double> point(std::int64_t node) const;

    /// Cartesian only: per-axis index decomposition.
    std::vector<int> indices(std::int64_t node) const;
    std::int64_t node_of(const std::vector<int>& idx) const;

    double min_step() const {
        if (polar) return radial.step();
        double h = axes[0].step();
        for (const auto& a : axes) h = std::min(h, a.step());
        return h;
    }
    double max_radius() const;
    double cell_volume() const;
};

}  // namespace hyperdisp

#endif
