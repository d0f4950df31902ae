#include "hyperdisp/classify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hyperdisp {

namespace {

double radius_of(const std::vector<double>& xi) {
    double s = 0.0;
    for (double v : xi) s += v * v;
    return std::sqrt(s);
}

struct LinFit {
    double slope = 0.0, intercept = 0.0, residual_rms = 0.0;
    int count = 0;
};

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinFit f;
    f.count = static_cast<int>(x.size());
    if (f.count < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < f.count; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = f.count * sxx - sx * sx;
    if (std::abs(det) < 1e-300) return f;
    f.slope = (f.count * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / f.count;
    double ss = 0.0;
    for (int i = 0; i < f.count; ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual_rms = std::sqrt(ss / f.count);
    return f;
}

/// k-th root in (Re, Im) ascending order at a frequency point.
Complex sorted_root(const SymbolSpec& S, const std::vector<double>& xi, int k) {
    std::vector<Complex> r = solve_roots(evaluate_symbol(S, xi));
    return r[k];
}

}  // namespace

StabilityVerdict stability_scan(const RootField& field) {
    StabilityVerdict v;
    v.min_im = 1e300;
    const std::int64_t N = field.nodes();
    for (std::int64_t node = 0; node < N; ++node)
        for (int k = 0; k < field.m; ++k) {
            double im = field.root(node, k).imag();
            if (im < v.min_im) {
                v.min_im = im;
                v.argmin_node = node;
                v.argmin_label = k;
            }
        }
    v.pass = v.min_im >= -1e-9 * (1.0 + field.coeff_bound);
    return v;
}

AxisBehavior axis_behavior(const RootField& field, int k, const std::vector<std::int64_t>& region,
                           const ClassifyTolerances& tol) {
    if (region.empty()) throw std::invalid_argument("axis_behavior: empty region");
    AxisBehavior out;
    const double h = field.grid.min_step();

    double inf_im = 1e300, region_rmax = 0.0;
    std::int64_t on_axis = 0;
    for (std::int64_t node : region) {
        Complex t = field.root(node, k);
        inf_im = std::min(inf_im, t.imag());
        region_rmax = std::max(region_rmax, radius_of(field.grid.point(node)));
        if (std::abs(t.imag()) <= tol.axis_tol * (1.0 + std::abs(t))) ++on_axis;
    }

    if (inf_im > tol.sep_threshold) {
        out.kind = AxisKind::Separated;
        out.delta = inf_im;
        return out;
    }
    if (static_cast<double>(on_axis) >= tol.onaxis_fraction * region.size()) {
        out.kind = AxisKind::OnAxis;
        out.delta = 0.0;
        return out;
    }

    // contact set: on-axis cells, or the argmin cluster when none resolve
    double min_abs_im = 1e300;
    for (std::int64_t node : region)
        min_abs_im = std::min(min_abs_im, std::abs(field.root(node, k).imag()));
    for (std::int64_t node : region) {
        Complex t = field.root(node, k);
        double a = std::abs(t.imag());
        if (a <= tol.axis_tol * (1.0 + std::abs(t)) || a <= 1.5 * min_abs_im + 1e-14)
            out.contact_cells.push_back(node);
    }

    // asymptotic approach: the near-axis cells hug the outer rim of the region
    double zmin_r = 1e300, zmax_r = 0.0;
    for (std::int64_t node : out.contact_cells) {
        double r = radius_of(field.grid.point(node));
        zmin_r = std::min(zmin_r, r);
        zmax_r = std::max(zmax_r, r);
    }
    if (zmin_r >= 0.9 * region_rmax && inf_im > tol.axis_tol) {
        out.kind = AxisKind::UnclassifiedAsymptotic;
        out.delta = inf_im;
        return out;
    }

    out.kind = AxisKind::MeetsFiniteOrder;

    // geometry of the contact set
    std::vector<std::vector<double>> zpts;
    for (std::int64_t node : out.contact_cells) zpts.push_back(field.grid.point(node));
    double diam = 0.0;
    std::vector<double> center(field.grid.dim, 0.0);
    for (const auto& p : zpts)
        for (int i = 0; i < field.grid.dim; ++i) center[i] += p[i] / zpts.size();
    for (size_t a = 0; a < zpts.size(); ++a)
        for (size_t b = a + 1; b < zpts.size(); ++b) {
            double d = 0.0;
            for (int i = 0; i < field.grid.dim; ++i) {
                double v = zpts[a][i] - zpts[b][i];
                d += v * v;
            }
            diam = std::max(diam, std::sqrt(d));
        }
    out.isolated_point = diam <= 2.5 * h;
    out.contact_at_origin = out.isolated_point && radius_of(center) <= 2.0 * h;

    // codimension ell of the contact set (a point has ell = n)
    if (out.isolated_point) {
        out.contact_codim = field.grid.dim;
    } else {
        MultiplicitySet tmp;
        tmp.cells = out.contact_cells;
        try {
            out.contact_codim = estimate_codimension(tmp, field.grid, tol);
        } catch (const std::runtime_error&) {
            out.contact_codim = 1;
            out.low_confidence = true;
        }
    }

    // s fit: log Im tau vs log dist(xi, Z) over [2h, 20h]
    std::vector<double> lx, ly, lt;
    bool neighborhood_stable = true;
    for (std::int64_t node : region) {
        std::vector<double> p = field.grid.point(node);
        double d = 1e300;
        for (const auto& z : zpts) {
            double s = 0.0;
            for (int i = 0; i < field.grid.dim; ++i) {
                double v = p[i] - z[i];
                s += v * v;
            }
            d = std::min(d, std::sqrt(s));
        }
        if (d < tol.fit_window_lo * h || d > tol.fit_window_hi * h) continue;
        Complex t = field.root(node, k);
        if (t.imag() < -tol.axis_tol * (1.0 + std::abs(t))) {
            neighborhood_stable = false;
            continue;
        }
        if (t.imag() <= 0.0) continue;
        lx.push_back(std::log(d));
        ly.push_back(std::log(t.imag()));
        lt.push_back(std::log(std::max(std::abs(t), 1e-300)));
    }
    if (lx.size() < 4) {
        out.low_confidence = true;
        out.s = 1;
        return out;
    }
    LinFit fit = linear_fit(lx, ly);
    out.raw_s = fit.slope;
    out.fit_residual = fit.residual_rms;
    bool parity_applies = out.isolated_point && neighborhood_stable;
    if (parity_applies) {
        int even = 2 * std::max(1, static_cast<int>(std::lround(fit.slope / 2.0)));
        out.parity_rounded = std::abs(fit.slope - std::lround(fit.slope)) < 0.3 &&
                             std::lround(fit.slope) % 2 != 0;
        out.s = even;
    } else {
        out.s = std::max(1, static_cast<int>(std::lround(fit.slope)));
    }
    if (std::abs(fit.slope - out.s) > 0.3 || fit.residual_rms > tol.fit_residual_max)
        out.low_confidence = true;
    // lower-bound constant: c0 * d^s <= Im tau over the fit window
    double c0 = 1e300;
    for (size_t i = 0; i < lx.size(); ++i)
        c0 = std::min(c0, std::exp(ly[i] - out.s * lx[i]));
    out.c0 = c0;

    // s1: |tau| <= c1 |xi - xi0|^{s1} near an isolated contact point with tau -> 0
    if (out.isolated_point) {
        double tau_at_center = 1e300;
        for (size_t i = 0; i < zpts.size(); ++i) {
            std::int64_t node = out.contact_cells[i];
            tau_at_center = std::min(tau_at_center, std::abs(field.root(node, k)));
        }
        if (tau_at_center <= 1e-3 * (1.0 + field.coeff_bound)) {
            LinFit f1 = linear_fit(lx, lt);
            out.raw_s1 = f1.slope;
            int s1 = std::max(1, static_cast<int>(std::lround(f1.slope)));
            double c1 = 0.0;
            for (size_t i = 0; i < lx.size(); ++i)
                c1 = std::max(c1, std::exp(lt[i] - s1 * lx[i]));
            out.s1 = s1;
            out.c1 = c1;
        }
    }
    return out;
}

std::vector<MultiplicitySet> detect_multiplicities(const RootField& field,
                                                   const ClassifyTolerances& tol) {
    const std::int64_t N = field.nodes();
    const int m = field.m;
    const FrequencyGrid& g = field.grid;

    auto neighbors = [&](std::int64_t node, std::vector<std::int64_t>& out) {
        out.clear();
        if (g.polar) {
            std::int64_t dir = node / g.radial.count, ir = node % g.radial.count;
            if (ir > 0) out.push_back(node - 1);
            if (ir + 1 < g.radial.count) out.push_back(node + 1);
            out.push_back(((dir + 1) % g.directions) * g.radial.count + ir);
            out.push_back(((dir + g.directions - 1) % g.directions) * g.radial.count + ir);
            return;
        }
        std::vector<int> idx = g.indices(node);
        for (int a = 0; a < g.dim; ++a) {
            if (idx[a] > 0) {
                idx[a] -= 1;
                out.push_back(g.node_of(idx));
                idx[a] += 1;
            }
            if (idx[a] + 1 < g.axes[a].count) {
                idx[a] += 1;
                out.push_back(g.node_of(idx));
                idx[a] -= 1;
            }
        }
    };

    // connected components of flagged cells
    std::vector<int> comp(N, -1);
    std::vector<std::vector<std::int64_t>> comp_cells;
    std::vector<std::int64_t> nb;
    for (std::int64_t seed = 0; seed < N; ++seed) {
        if (!field.mult_flag[seed] || comp[seed] >= 0) continue;
        int id = static_cast<int>(comp_cells.size());
        comp_cells.emplace_back();
        std::deque<std::int64_t> queue{seed};
        comp[seed] = id;
        while (!queue.empty()) {
            std::int64_t node = queue.front();
            queue.pop_front();
            comp_cells[id].push_back(node);
            neighbors(node, nb);
            for (std::int64_t x : nb)
                if (field.mult_flag[x] && comp[x] < 0) {
                    comp[x] = id;
                    queue.push_back(x);
                }
        }
    }

    double gap_tol = std::pow(std::max(field.mult_threshold, 1e-280),
                              1.0 / (m * (m - 1)));

    // label participation and grouping of components with equal label sets
    std::map<std::vector<int>, MultiplicitySet> grouped;
    for (const auto& cells : comp_cells) {
        std::set<int> labels;
        bool on_axis = false;
        for (std::int64_t node : cells) {
            double min_gap = 1e300;
            for (int a = 0; a < m; ++a)
                for (int b = a + 1; b < m; ++b)
                    min_gap = std::min(min_gap,
                                       std::abs(field.root(node, a) - field.root(node, b)));
            double cell_tol = std::max(gap_tol, 10.0 * min_gap);
            std::set<int> cell_labels;
            for (int a = 0; a < m; ++a)
                for (int b = a + 1; b < m; ++b)
                    if (std::abs(field.root(node, a) - field.root(node, b)) <= cell_tol) {
                        cell_labels.insert(a);
                        cell_labels.insert(b);
                    }
            bool cell_axis = !cell_labels.empty();
            for (int k : cell_labels) {
                Complex t = field.root(node, k);
                if (std::abs(t.imag()) > tol.axis_tol * (1.0 + std::abs(t))) cell_axis = false;
            }
            on_axis = on_axis || cell_axis;
            labels.insert(cell_labels.begin(), cell_labels.end());
        }
        if (labels.size() < 2) continue;  // isolated near-threshold cell, not a true crossing
        std::vector<int> key(labels.begin(), labels.end());
        auto [it, fresh] = grouped.try_emplace(key);
        MultiplicitySet& ms = it->second;
        if (fresh) {
            ms.labels = key;
            ms.L = static_cast<int>(key.size());
        }
        ms.cells.insert(ms.cells.end(), cells.begin(), cells.end());
        ms.contains_axis = ms.contains_axis || on_axis;
    }

    std::vector<MultiplicitySet> out;
    for (auto& [key, ms] : grouped) out.push_back(std::move(ms));
    return out;
}

int estimate_codimension(MultiplicitySet& set, const FrequencyGrid& grid,
                         const ClassifyTolerances& tol) {
    (void)tol;
    if (set.cells.empty()) throw std::invalid_argument("estimate_codimension: empty set");
    const int n = grid.dim;
    const double h = grid.min_step();
    const std::int64_t N = grid.node_count();

    std::vector<std::vector<double>> spts;
    std::size_t stride = std::max<std::size_t>(1, set.cells.size() / 2000);
    for (std::size_t i = 0; i < set.cells.size(); i += stride)
        spts.push_back(grid.point(set.cells[i]));

    std::vector<double> dist(N);
    for (std::int64_t node = 0; node < N; ++node) {
        std::vector<double> p = grid.point(node);
        double d = 1e300;
        for (const auto& z : spts) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                double v = p[i] - z[i];
                s += v * v;
            }
            d = std::min(d, s);
        }
        dist[node] = std::sqrt(d);
    }

    const double ladder[] = {2.0, 2.83, 4.0, 5.66, 8.0, 11.3, 16.0, 22.6, 32.0};
    double extent = 2.0 * grid.max_radius();
    double cellvol = grid.polar ? std::pow(h, n) : grid.cell_volume();

    // subcell refinement x2: nodes near the eps-boundary contribute fractionally
    std::vector<double> lx, ly;
    for (double mult : ladder) {
        double eps = mult * h;
        if (eps > 0.25 * extent) break;
        double meas = 0.0;
        for (std::int64_t node = 0; node < N; ++node) {
            if (dist[node] <= eps - h) {
                meas += 1.0;
            } else if (dist[node] < eps + h) {
                std::vector<double> p = grid.point(node);
                int inside = 0, total = 1 << n;
                for (int corner = 0; corner < total; ++corner) {
                    double d = 1e300;
                    std::vector<double> q = p;
                    for (int i = 0; i < n; ++i) q[i] += ((corner >> i) & 1) ? h / 4 : -h / 4;
                    for (const auto& z : spts) {
                        double s = 0.0;
                        for (int i = 0; i < n; ++i) {
                            double v = q[i] - z[i];
                            s += v * v;
                        }
                        d = std::min(d, std::sqrt(s));
                    }
                    if (d <= eps) ++inside;
                }
                meas += static_cast<double>(inside) / total;
            }
        }
        if (meas <= 0.0) continue;
        lx.push_back(std::log(eps));
        ly.push_back(std::log(meas * cellvol));
    }
    if (lx.size() < 4)
        throw std::runtime_error("estimate_codimension: fewer than 4 usable epsilon values");
    LinFit fit = linear_fit(lx, ly);
    set.codim_slope = fit.slope;
    set.codim_residual = fit.residual_rms;
    int ell = static_cast<int>(std::lround(fit.slope));
    set.codim = std::min(n, std::max(1, ell));
    return set.codim;
}

// --- Hessian classification ---

namespace {

Complex det_small(const std::vector<std::vector<Complex>>& H) {
    const int n = static_cast<int>(H.size());
    if (n == 1) return H[0][0];
    if (n == 2) return H[0][0] * H[1][1] - H[0][1] * H[1][0];
    return H[0][0] * (H[1][1] * H[2][2] - H[1][2] * H[2][1]) -
           H[0][1] * (H[1][0] * H[2][2] - H[1][2] * H[2][0]) +
           H[0][2] * (H[1][0] * H[2][1] - H[1][1] * H[2][0]);
}

/// Singular values of a small complex matrix: sqrt of eigenvalues of H^H H
/// (characteristic polynomial route; n <= 3).
std::vector<double> singular_values(const std::vector<std::vector<Complex>>& H) {
    const int n = static_cast<int>(H.size());
    std::vector<std::vector<Complex>> G(n, std::vector<Complex>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) G[i][j] += std::conj(H[k][i]) * H[k][j];
    std::vector<Complex> charpoly;  // det(x I - G), leading-first
    if (n == 1) {
        charpoly = {1.0, -G[0][0]};
    } else if (n == 2) {
        charpoly = {1.0, -(G[0][0] + G[1][1]), G[0][0] * G[1][1] - G[0][1] * G[1][0]};
    } else {
        Complex tr = G[0][0] + G[1][1] + G[2][2];
        Complex sum2 = G[0][0] * G[1][1] - G[0][1] * G[1][0] + G[0][0] * G[2][2] -
                       G[0][2] * G[2][0] + G[1][1] * G[2][2] - G[1][2] * G[2][1];
        charpoly = {1.0, -tr, sum2, -det_small(G)};
    }
    std::vector<double> sv;
    for (Complex r : poly_roots(charpoly)) sv.push_back(std::sqrt(std::max(0.0, r.real())));
    std::sort(sv.rbegin(), sv.rend());
    return sv;
}

}  // namespace

HessianClass hessian_class(const SymbolSpec& S, const RootField& field, int k,
                           const std::vector<std::int64_t>& region,
                           const ClassifyTolerances& tol) {
    HessianClass out;
    const int n = S.dim;

    std::vector<RootJet> jets;
    std::vector<double> radii;
    std::size_t stride = std::max<std::size_t>(1, region.size() / 200);
    for (std::size_t i = 0; i < region.size(); i += stride) {
        std::int64_t node = region[i];
        if (field.mult_flag[node]) continue;
        std::vector<double> xi = field.grid.point(node);
        try {
            jets.push_back(root_jet(S, xi, field.root(node, k)));
            radii.push_back(radius_of(xi));
        } catch (const std::runtime_error&) {
            continue;  // too close to a multiplicity for a jet
        }
    }
    if (jets.empty()) throw std::runtime_error("hessian_class: no usable jet samples in region");
    out.evidence = static_cast<int>(jets.size());

    double entry_scale = 0.0;
    for (const auto& j : jets)
        for (const auto& row : j.hessian)
            for (Complex v : row) entry_scale = std::max(entry_scale, std::abs(v));

    double min_det = 1e300;
    int min_rank = n;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < jets.size(); ++i) {
        double d = std::abs(det_small(jets[i].hessian));
        min_det = std::min(min_det, d);
        if (d > 0.0) {
            lx.push_back(std::log(1.0 + radii[i]));
            ly.push_back(std::log(d));
        }
        std::vector<double> sv = singular_values(jets[i].hessian);
        double floor = std::max(1e-7 * sv[0], 1e-9 * entry_scale);
        int rank = 0;
        for (double s : sv)
            if (s >= floor) ++rank;
        min_rank = std::min(min_rank, rank);
    }
    out.min_abs_det = min_det;

    if (min_det >= 1e-10 && lx.size() >= 4) {
        out.kind = HessKind::NonDegenerate;
        LinFit fit = linear_fit(lx, ly);
        out.M = -fit.slope;
        double c0 = 1e300;
        for (std::size_t i = 0; i < lx.size(); ++i)
            c0 = std::min(c0, std::exp(ly[i] + out.M * lx[i]));
        out.C0 = c0;

        // Thm-2.2.1-style probe: critical points of tau + xtilde.xi located by
        // Newton on grad tau + xtilde = 0 must be isolated with definite Hessian
        out.critical_ok = true;
        std::mt19937_64 rng(tol.seed);
        std::uniform_int_distribution<std::size_t> pick(0, jets.size() - 1);
        for (int probe = 0; probe < 3; ++probe) {
            const RootJet& target = jets[pick(rng)];
            std::vector<double> xt(n);
            for (int i = 0; i < n; ++i) xt[i] = -target.gradient[i].real();
            // Newton from a different sample
            std::size_t start = pick(rng);
            std::vector<double> xi = field.grid.point(region[std::min(
                region.size() - 1, start * stride)]);
            for (int it = 0; it < 30; ++it) {
                RootJet j;
                try {
                    j = root_jet(S, xi, jets[start].value);
                } catch (...) {
                    break;
                }
                // solve H dx = -(grad + xt)
                std::vector<double> rhs(n);
                double res = 0.0;
                for (int i = 0; i < n; ++i) {
                    rhs[i] = -(j.gradient[i].real() + xt[i]);
                    res += rhs[i] * rhs[i];
                }
                if (std::sqrt(res) < 1e-10) {
                    std::vector<double> sv = singular_values(j.hessian);
                    if (sv.back() < std::max(1e-7 * sv.front(), 1e-9 * entry_scale))
                        out.critical_ok = false;  // degenerate critical point
                    break;
                }
                // small real solve
                std::vector<std::vector<double>> A(n, std::vector<double>(n + 1));
                for (int r = 0; r < n; ++r) {
                    for (int c = 0; c < n; ++c) A[r][c] = j.hessian[r][c].real();
                    A[r][n] = rhs[r];
                }
                for (int c = 0; c < n; ++c) {
                    int piv = c;
                    for (int r = c + 1; r < n; ++r)
                        if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
                    if (std::abs(A[piv][c]) < 1e-14) { it = 30; break; }
                    std::swap(A[piv], A[c]);
                    for (int r = 0; r < n; ++r) {
                        if (r == c) continue;
                        double f = A[r][c] / A[c][c];
                        for (int cc = c; cc <= n; ++cc) A[r][cc] -= f * A[c][cc];
                    }
                }
                bool bad = false;
                for (int i = 0; i < n; ++i) {
                    double step = A[i][n] / A[i][i];
                    if (!std::isfinite(step)) { bad = true; break; }
                    xi[i] += std::max(-1.0, std::min(1.0, step));
                }
                if (bad) break;
            }
        }
        return out;
    }

    if (min_rank == n - 1) {
        out.kind = HessKind::RankDeficient;
        out.rank = n - 1;
    } else {
        out.kind = HessKind::Degenerate;
        out.rank = min_rank;
    }
    return out;
}

// --- level sets and contact orders ---

namespace {

/// Re of the k-th sorted root along a ray; used for bracketing level radii.
double ray_root(const SymbolSpec& S, const std::vector<double>& dir, double rho, int k) {
    std::vector<double> xi(dir.size());
    for (std::size_t i = 0; i < dir.size(); ++i) xi[i] = rho * dir[i];
    return sorted_root(S, xi, k).real();
}

}  // namespace

LevelCurve level_set_trace(const SymbolSpec& S, int k, double lambda,
                           const std::vector<double>& plane_u, const std::vector<double>& plane_v,
                           int directions) {
    LevelCurve out;
    out.lambda = lambda;
    const int n = S.dim;
    if (static_cast<int>(plane_u.size()) != n || static_cast<int>(plane_v.size()) != n)
        throw std::invalid_argument("level_set_trace: plane basis dimension mismatch");

    // ray scale from |tau_k| on a few unit directions
    double cmin = 1e300;
    for (int probe = 0; probe < 8; ++probe) {
        double th = 2.0 * M_PI * probe / 8 + 0.1;
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i) w[i] = std::cos(th) * plane_u[i] + std::sin(th) * plane_v[i];
        double v = std::abs(ray_root(S, w, 1.0, k));
        if (v > 1e-6) cmin = std::min(cmin, v);
    }
    if (cmin > 1e200) cmin = 0.05;
    double rho_hi = 6.0 * (1.0 + std::abs(lambda)) / std::min(std::max(cmin, 0.05), 1e3);

    for (int j = 0; j < directions; ++j) {
        double th = 2.0 * M_PI * j / directions;
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i) w[i] = std::cos(th) * plane_u[i] + std::sin(th) * plane_v[i];
        // bracket g(rho) = tau_k(rho w) - lambda on a ladder
        const int steps = 96;
        double prev_rho = rho_hi / steps;
        double prev_g = ray_root(S, w, prev_rho, k) - lambda;
        double lo = 0.0, hi = 0.0;
        for (int s = 2; s <= steps; ++s) {
            double rho = rho_hi * s / steps;
            double g = ray_root(S, w, rho, k) - lambda;
            if (prev_g == 0.0) { lo = hi = prev_rho; break; }
            if (prev_g * g <= 0.0) { lo = prev_rho; hi = rho; break; }
            prev_rho = rho;
            prev_g = g;
        }
        if (hi == 0.0 && lo == 0.0) {
            out.skipped_directions += 1;
            continue;
        }
        double rho = lo;
        if (hi > lo) {
            double glo = ray_root(S, w, lo, k) - lambda;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                double gm = ray_root(S, w, mid, k) - lambda;
                if (glo * gm <= 0.0) hi = mid;
                else { lo = mid; glo = gm; }
            }
            rho = 0.5 * (lo + hi);
        }
        out.theta.push_back(th);
        out.rho.push_back(rho);
        out.points.push_back({rho * std::cos(th), rho * std::sin(th)});
    }
    return out;
}

namespace {

/// Least-squares polynomial fit of (u, v) samples in scaled coordinates and
/// the least k >= 2 with coefficient above the noise floor. Returns 0 for
/// "no order up to the cap" (Infinite flag).
int graph_contact_order(const std::vector<double>& u, const std::vector<double>& v, int cap,
                        bool* low_confidence) {
    const int pts = static_cast<int>(u.size());
    double uscale = 0.0;
    for (double x : u) uscale = std::max(uscale, std::abs(x));
    if (uscale <= 0.0) throw std::invalid_argument("contact order: degenerate sample span");
    const int deg = std::min(cap, pts - 2);
    const int nc = deg + 1;
    std::vector<std::vector<double>> A(nc, std::vector<double>(nc, 0.0));
    std::vector<double> b(nc, 0.0);
    for (int p = 0; p < pts; ++p) {
        double x = u[p] / uscale;
        std::vector<double> pw(nc);
        pw[0] = 1.0;
        for (int i = 1; i < nc; ++i) pw[i] = pw[i - 1] * x;
        for (int i = 0; i < nc; ++i) {
            b[i] += pw[i] * v[p];
            for (int j = 0; j < nc; ++j) A[i][j] += pw[i] * pw[j];
        }
    }
    // gaussian elimination
    for (int c = 0; c < nc; ++c) {
        int piv = c;
        for (int r = c + 1; r < nc; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        if (std::abs(A[c][c]) < 1e-300) throw std::runtime_error("contact order: singular fit");
        for (int r = 0; r < nc; ++r) {
            if (r == c) continue;
            double f = A[r][c] / A[c][c];
            for (int cc = c; cc < nc; ++cc) A[r][cc] -= f * A[c][cc];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> coef(nc);
    for (int i = 0; i < nc; ++i) coef[i] = b[i] / A[i][i];

    double cmax = 0.0;
    for (int i = 2; i < nc; ++i) cmax = std::max(cmax, std::abs(coef[i]));
    if (low_confidence) *low_confidence = false;
    if (cmax < 1e-11) return 0;  // flat to numerical precision: Infinite flag
    double floor = std::max(1e-12, 1e-5 * cmax);
    for (int i = 2; i < nc; ++i)
        if (std::abs(coef[i]) > floor) {
            if (low_confidence && std::abs(coef[i]) < 20.0 * floor) *low_confidence = true;
            return i;
        }
    return 0;
}

}  // namespace

int contact_order(const std::vector<std::array<double, 2>>& samples, int sigma_index,
                  const ClassifyTolerances& tol) {
    const int pts = static_cast<int>(samples.size());
    if (pts < 9) throw std::invalid_argument("contact_order: need >= 9 samples");
    if (sigma_index < 0 || sigma_index >= pts)
        throw std::invalid_argument("contact_order: sigma index out of range");
    // tangent from neighbors (wrapping: curves from level_set_trace are closed)
    auto at = [&](int i) { return samples[(i % pts + pts) % pts]; };
    std::array<double, 2> tp = at(sigma_index + 1), tm = at(sigma_index - 1);
    double tx = tp[0] - tm[0], ty = tp[1] - tm[1];
    double tn = std::hypot(tx, ty);
    if (tn < 1e-300) throw std::invalid_argument("contact_order: coincident neighbor samples");
    tx /= tn;
    ty /= tn;
    double nx = -ty, ny = tx;

    std::vector<double> u, v;
    const std::array<double, 2> s0 = samples[sigma_index];
    for (int off = -10; off <= 10; ++off) {
        std::array<double, 2> p = at(sigma_index + off);
        double dx = p[0] - s0[0], dy = p[1] - s0[1];
        u.push_back(dx * tx + dy * ty);
        v.push_back(dx * nx + dy * ny);
    }
    bool low = false;
    int order = graph_contact_order(u, v, tol.contact_cap, &low);
    return order;
}

namespace {

/// Contact order at a point of Sigma_lambda in the plane span(nu, w) through
/// sigma: offsets along w, normal deviations solved on the level set.
int surface_contact_order(const SymbolSpec& S, int k, double lambda,
                          const std::vector<double>& sigma, const std::vector<double>& nu,
                          const std::vector<double>& w, double scale, int cap, bool* low_conf) {
    const int n = S.dim;
    auto root_at = [&](const std::vector<double>& xi) { return sorted_root(S, xi, k).real(); };
    double hc = 0.03 * scale;
    std::vector<double> us, vs;
    for (int off = -10; off <= 10; ++off) {
        double u = off * hc;
        // solve g(t) = tau_k(sigma + u w + t nu) - lambda = 0 around t=0
        auto g = [&](double t) {
            std::vector<double> xi(n);
            for (int i = 0; i < n; ++i) xi[i] = sigma[i] + u * w[i] + t * nu[i];
            return root_at(xi) - lambda;
        };
        double lo = -0.6 * scale, hi = 0.6 * scale;
        double glo = g(lo), ghi = g(hi);
        if (glo * ghi > 0.0) continue;  // direction leaves the traced patch
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            double gm = g(mid);
            if (glo * gm <= 0.0) { hi = mid; ghi = gm; }
            else { lo = mid; glo = gm; }
        }
        us.push_back(u);
        vs.push_back(0.5 * (lo + hi));
    }
    if (us.size() < 9) throw std::runtime_error("contact order: too few solvable offsets");
    // subtract the affine part (v(0) and tangent misfit are absorbed by the fit basis)
    return graph_contact_order(us, vs, cap, low_conf);
}

}  // namespace

ContactIndex convexity_indices(const SymbolSpec& S, int k, const std::vector<double>& lambdas,
                               const ClassifyTolerances& tol) {
    const int n = S.dim;
    if (n < 2) throw std::invalid_argument("convexity_indices: needs n >= 2");
    ContactIndex out;
    out.gamma = 2;
    out.gamma0 = 2;
    std::mt19937_64 rng(tol.seed);

    for (double lambda : lambdas) {
        int gamma_l = 2, gamma0_l = 2;

        // directions sampled uniformly; multiples of 4 keep the axes included
        int nsig = tol.sigma_samples;
        std::vector<std::vector<double>> sigmas;
        std::vector<std::vector<double>> nus;
        for (int j = 0; j < nsig; ++j) {
            double th = 2.0 * M_PI * j / nsig;
            std::vector<double> w(n, 0.0);
            w[0] = std::cos(th);
            w[1] = std::sin(th);
            // radial solve for the point on Sigma_lambda
            double cref = std::abs(ray_root(S, w, 1.0, k));
            if (cref < 1e-8) continue;
            double rho_hi = 6.0 * (1.0 + std::abs(lambda)) / std::max(cref, 0.05);
            double lo = rho_hi / 96, hi = 0.0;
            double glo = ray_root(S, w, lo, k) - lambda;
            double prev = lo, prevg = glo;
            for (int s = 2; s <= 96; ++s) {
                double rho = rho_hi * s / 96;
                double g = ray_root(S, w, rho, k) - lambda;
                if (prevg * g <= 0.0) { lo = prev; hi = rho; break; }
                prev = rho;
                prevg = g;
            }
            if (hi == 0.0) continue;
            glo = ray_root(S, w, lo, k) - lambda;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                double gm = ray_root(S, w, mid, k) - lambda;
                if (glo * gm <= 0.0) hi = mid;
                else { lo = mid; glo = gm; }
            }
            double rho = 0.5 * (lo + hi);
            std::vector<double> sigma(n);
            for (int i = 0; i < n; ++i) sigma[i] = rho * w[i];
            // normal from the implicit gradient
            RootJet jet;
            try {
                jet = root_jet(S, sigma, sorted_root(S, sigma, k));
            } catch (const std::runtime_error&) {
                continue;
            }
            std::vector<double> nu(n);
            double nn = 0.0;
            for (int i = 0; i < n; ++i) {
                nu[i] = jet.gradient[i].real();
                nn += nu[i] * nu[i];
            }
            nn = std::sqrt(nn);
            if (nn < 1e-10) continue;
            for (int i = 0; i < n; ++i) nu[i] /= nn;
            sigmas.push_back(sigma);
            nus.push_back(nu);
        }

        for (std::size_t si = 0; si < sigmas.size(); ++si) {
            const auto& sigma = sigmas[si];
            const auto& nu = nus[si];
            double scale = radius_of(sigma);

            // planes through the normal: coordinate-axis projections plus
            // seeded random rotations for n >= 3; single plane for n = 2
            std::vector<std::vector<double>> ws;
            if (n == 2) {
                ws.push_back({-nu[1], nu[0]});
            } else {
                auto push_orth = [&](std::vector<double> cand) {
                    double dot = 0.0;
                    for (int i = 0; i < n; ++i) dot += cand[i] * nu[i];
                    for (int i = 0; i < n; ++i) cand[i] -= dot * nu[i];
                    double norm = radius_of(cand);
                    if (norm < 1e-8) return;
                    for (int i = 0; i < n; ++i) cand[i] /= norm;
                    ws.push_back(cand);
                };
                for (int ax = 0; ax < n; ++ax) {
                    std::vector<double> e(n, 0.0);
                    e[ax] = 1.0;
                    push_orth(e);
                }
                std::normal_distribution<double> gauss(0.0, 1.0);
                for (int extra = 0; extra < tol.extra_planes; ++extra) {
                    std::vector<double> r(n);
                    for (int i = 0; i < n; ++i) r[i] = gauss(rng);
                    push_orth(r);
                }
            }

            int best_min = 1000000, best_max = 0;
            bool any = false;
            for (const auto& w : ws) {
                int order = 0;
                bool low = false;
                try {
                    order = surface_contact_order(S, k, lambda, sigma, nu, w, scale,
                                                  tol.contact_cap, &low);
                } catch (const std::runtime_error&) {
                    continue;
                }
                any = true;
                out.low_confidence = out.low_confidence || low;
                if (order == 0) {
                    out.infinite_flag = true;
                    order = tol.contact_cap + 1;
                }
                best_min = std::min(best_min, order);
                best_max = std::max(best_max, order);
                out.planes_sampled = std::max(out.planes_sampled,
                                              static_cast<int>(ws.size()));
            }
            if (!any) continue;
            gamma_l = std::max(gamma_l, best_max);
            gamma0_l = std::max(gamma0_l, best_min);
        }

        // convexity verdict for Sigma_lambda: sign-constant turning of the
        // traced plane curve in coordinate sections
        int sections = (n == 2) ? 1 : 3;
        for (int sec = 0; sec < sections && out.convex; ++sec) {
            std::vector<double> u(n, 0.0), v(n, 0.0);
            if (n == 2) {
                u[0] = 1.0;
                v[1] = 1.0;
            } else {
                u[sec] = 1.0;
                v[(sec + 1) % n] = 1.0;
            }
            LevelCurve curve = level_set_trace(S, k, lambda, u, v, 64);
            if (curve.points.size() < 8) continue;
            double pos = 0.0, neg = 0.0, scale3 = 0.0;
            const auto& pts = curve.points;
            for (std::size_t j = 0; j < pts.size(); ++j) {
                const auto &a = pts[j], &b = pts[(j + 1) % pts.size()],
                           &c = pts[(j + 2) % pts.size()];
                double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
                double eln = std::hypot(b[0] - a[0], b[1] - a[1]);
                scale3 = std::max(scale3, eln * eln * eln);
                if (cross > 0) pos = std::max(pos, cross);
                if (cross < 0) neg = std::max(neg, -cross);
            }
            double noise = 1e-7 * std::max(scale3, 1e-30);
            if (pos > noise && neg > noise) out.convex = false;
        }

        out.per_lambda.push_back({lambda, static_cast<double>(gamma_l),
                                  static_cast<double>(gamma0_l)});
        out.gamma = std::max(out.gamma, gamma_l);
        out.gamma0 = std::max(out.gamma0, gamma0_l);
    }

    // homogeneous strictly hyperbolic roots satisfy gamma <= m; enforce
    if (S.lower.empty() && !out.infinite_flag && out.gamma > S.order) {
        out.gamma = S.order;
        out.gamma0 = std::min(out.gamma0, out.gamma);
        out.low_confidence = true;
    }
    if (n == 2 && out.gamma0 != out.gamma)
        throw std::logic_error("convexity_indices: gamma0 != gamma in n=2");
    return out;
}

// --- zone report ---

namespace {

std::vector<double> lambda_samples_for(const RootField& field, int k,
                                       const std::vector<std::int64_t>& region, int count) {
    std::vector<double> res;
    std::vector<double> vals;
    for (std::int64_t node : region) {
        double re = field.root(node, k).real();
        if (std::abs(re) > 1e-9) vals.push_back(std::abs(re));
    }
    if (vals.empty()) return res;
    std::sort(vals.begin(), vals.end());
    double sgn = 0.0;
    // sign of the typical Re tau over the region
    double mean = 0.0;
    for (std::int64_t node : region) mean += field.root(node, k).real();
    sgn = (mean >= 0.0) ? 1.0 : -1.0;
    const double q[] = {0.35, 0.6, 0.85};
    for (int i = 0; i < count && i < 3; ++i)
        res.push_back(sgn * vals[static_cast<std::size_t>(q[i] * (vals.size() - 1))]);
    return res;
}

}  // namespace

ZoneReport build_zone_report(const SymbolSpec& S, const RootField& field,
                             const ZoneReportOptions& opt) {
    const ClassifyTolerances& tol = opt.tol;
    ZoneReport rep;
    rep.dim = S.dim;
    rep.order = S.order;
    rep.symbol_name = S.name;
    rep.grid_radius = field.grid.max_radius();
    rep.region_restricted = opt.exclusion_radius > 0.0;
    rep.exclusion_radius = opt.exclusion_radius;

    const std::int64_t N = field.nodes();
    std::vector<std::int64_t> region;
    std::vector<double> radius(N);
    for (std::int64_t node = 0; node < N; ++node) {
        radius[node] = radius_of(field.grid.point(node));
        if (radius[node] > opt.exclusion_radius) region.push_back(node);
    }
    if (region.empty()) throw std::invalid_argument("build_zone_report: region empty");

    // stability over the region
    rep.stability.min_im = 1e300;
    for (std::int64_t node : region)
        for (int k = 0; k < field.m; ++k) {
            double im = field.root(node, k).imag();
            if (im < rep.stability.min_im) {
                rep.stability.min_im = im;
                rep.stability.argmin_node = node;
                rep.stability.argmin_label = k;
            }
        }
    rep.stability.pass = rep.stability.min_im >= -1e-9 * (1.0 + field.coeff_bound);

    for (std::int64_t node : region)
        if (radius[node] >= 0.97 * rep.grid_radius)
            for (int k = 0; k < field.m; ++k)
                rep.edge_min_im = std::min(rep.edge_min_im, field.root(node, k).imag());

    // multiplicity sets restricted to the region
    std::vector<uint8_t> in_region(N, 0);
    for (std::int64_t node : region) in_region[node] = 1;
    std::vector<MultiplicitySet> all_mults = detect_multiplicities(field, tol);
    for (auto& ms : all_mults) {
        std::vector<std::int64_t> kept;
        for (std::int64_t c : ms.cells)
            if (in_region[c]) kept.push_back(c);
        if (kept.empty()) continue;
        ms.cells = std::move(kept);
        estimate_codimension(ms, field.grid, tol);
        rep.mults.push_back(std::move(ms));
    }

    // partition: multiplicity neighborhoods > shell > bounded remainder
    const double h = field.grid.min_step();
    double mult_eps = tol.mult_margin * h;
    std::vector<int> owner(N, -1);  // mult set index, or -1
    for (std::size_t mi = 0; mi < rep.mults.size(); ++mi) {
        std::vector<std::vector<double>> pts;
        for (std::int64_t c : rep.mults[mi].cells) pts.push_back(field.grid.point(c));
        for (std::int64_t node : region) {
            if (owner[node] >= 0) continue;
            std::vector<double> p = field.grid.point(node);
            for (const auto& z : pts) {
                double s = 0.0;
                for (int i = 0; i < field.grid.dim; ++i) {
                    double v = p[i] - z[i];
                    s += v * v;
                }
                if (std::sqrt(s) <= mult_eps) {
                    owner[node] = static_cast<int>(mi);
                    break;
                }
            }
        }
    }

    double shell_r = tol.shell_fraction * rep.grid_radius;
    for (const auto& ms : rep.mults)
        for (std::int64_t c : ms.cells)
            shell_r = std::max(shell_r, 1.1 * radius[c]);

    Zone shell;
    shell.kind = ZoneKind::LargeShell;
    Zone bounded;
    bounded.kind = ZoneKind::BoundedNoMult;
    std::vector<Zone> mult_zones(rep.mults.size());
    for (std::size_t mi = 0; mi < rep.mults.size(); ++mi) {
        mult_zones[mi].kind = ZoneKind::MultNeighborhood;
        mult_zones[mi].mult_index = static_cast<int>(mi);
    }
    for (std::int64_t node : region) {
        if (owner[node] >= 0) mult_zones[owner[node]].cells.push_back(node);
        else if (radius[node] >= shell_r) shell.cells.push_back(node);
        else bounded.cells.push_back(node);
    }

    // per-root classification of shell and bounded zones
    auto classify_zone = [&](Zone& z) {
        if (z.cells.empty()) return;
        for (int k = 0; k < field.m; ++k) {
            RootClassification rc;
            rc.axis = axis_behavior(field, k, z.cells, tol);
            if (rc.axis.kind == AxisKind::OnAxis) {
                rc.hessian = hessian_class(S, field, k, z.cells, tol);
                bool need_contact =
                    S.dim >= 2 && rc.hessian->kind != HessKind::NonDegenerate;
                if (need_contact) {
                    // sorted index of label k at a reference cell of the zone
                    std::int64_t ref = z.cells[z.cells.size() / 2];
                    std::vector<Complex> at_ref(field.roots.begin() + ref * field.m,
                                                field.roots.begin() + (ref + 1) * field.m);
                    std::vector<int> order(field.m);
                    for (int i = 0; i < field.m; ++i) order[i] = i;
                    std::sort(order.begin(), order.end(), [&](int a, int b) {
                        if (at_ref[a].real() != at_ref[b].real())
                            return at_ref[a].real() < at_ref[b].real();
                        return at_ref[a].imag() < at_ref[b].imag();
                    });
                    int sorted_k = 0;
                    for (int i = 0; i < field.m; ++i)
                        if (order[i] == k) sorted_k = i;
                    std::vector<double> lambdas =
                        lambda_samples_for(field, k, z.cells, tol.lambda_samples);
                    if (!lambdas.empty()) {
                        try {
                            rc.contact = convexity_indices(S, sorted_k, lambdas, tol);
                        } catch (const std::exception&) {
                            // leaves contact empty; prediction falls back to abstention
                        }
                    }
                }
                if (z.kind == ZoneKind::BoundedNoMult) {
                    // Part II regularity: |d_omega tau_k(lambda omega)| >= C0
                    double min_dir = 1e300;
                    std::size_t stride = std::max<std::size_t>(1, z.cells.size() / 100);
                    for (std::size_t i = 0; i < z.cells.size(); i += stride) {
                        std::int64_t node = z.cells[i];
                        std::vector<double> xi = field.grid.point(node);
                        double r = radius[node];
                        if (r < 2.0 * h) continue;
                        try {
                            RootJet j = root_jet(S, xi, field.root(node, k));
                            double dd = 0.0;
                            for (int i2 = 0; i2 < S.dim; ++i2)
                                dd += j.gradient[i2].real() * xi[i2] / r;
                            min_dir = std::min(min_dir, std::abs(dd));
                        } catch (const std::runtime_error&) {
                            continue;
                        }
                    }
                    rc.smallxi_ok = (min_dir > 1e200) ? false : min_dir >= tol.smallxi_c0;
                }
            }
            z.per_root[k] = std::move(rc);
        }
    };
    classify_zone(shell);
    classify_zone(bounded);

    // collective behavior inside each multiplicity neighborhood
    for (std::size_t mi = 0; mi < rep.mults.size(); ++mi) {
        Zone& z = mult_zones[mi];
        if (z.cells.empty()) continue;
        const MultiplicitySet& ms = rep.mults[mi];
        AxisBehavior collective;
        double inf_im = 1e300;
        std::int64_t on_axis = 0, total = 0;
        for (std::int64_t node : z.cells)
            for (int k : ms.labels) {
                Complex t = field.root(node, k);
                inf_im = std::min(inf_im, t.imag());
                ++total;
                if (std::abs(t.imag()) <= tol.axis_tol * (1.0 + std::abs(t))) ++on_axis;
            }
        if (inf_im > tol.sep_threshold) {
            collective.kind = AxisKind::Separated;
            collective.delta = inf_im;
        } else if (static_cast<double>(on_axis) >= tol.onaxis_fraction * total) {
            collective.kind = AxisKind::OnAxis;
        } else {
            // meets the axis: fit s against distance to the multiplicity set
            std::vector<double> lx, ly;
            std::vector<std::vector<double>> zpts;
            for (std::int64_t c : ms.cells) zpts.push_back(field.grid.point(c));
            for (std::int64_t node : z.cells) {
                std::vector<double> p = field.grid.point(node);
                double d = 1e300;
                for (const auto& zp : zpts) {
                    double s = 0.0;
                    for (int i = 0; i < field.grid.dim; ++i) {
                        double v = p[i] - zp[i];
                        s += v * v;
                    }
                    d = std::min(d, std::sqrt(s));
                }
                if (d < tol.fit_window_lo * h || d > tol.fit_window_hi * h) continue;
                for (int k : ms.labels) {
                    double im = field.root(node, k).imag();
                    if (im <= 0.0) continue;
                    lx.push_back(std::log(d));
                    ly.push_back(std::log(im));
                }
            }
            collective.kind = AxisKind::MeetsFiniteOrder;
            if (lx.size() >= 4) {
                LinFit fit = linear_fit(lx, ly);
                collective.raw_s = fit.slope;
                collective.s = std::max(1, static_cast<int>(std::lround(fit.slope)));
                collective.fit_residual = fit.residual_rms;
                collective.low_confidence = fit.residual_rms > tol.fit_residual_max;
            } else {
                collective.s = 1;
                collective.low_confidence = true;
            }
        }
        z.collective = std::move(collective);
    }

    int next_id = 0;
    if (!shell.cells.empty()) {
        shell.id = next_id++;
        rep.zones.push_back(std::move(shell));
    }
    for (auto& z : mult_zones)
        if (!z.cells.empty()) {
            z.id = next_id++;
            rep.zones.push_back(std::move(z));
        }
    if (!bounded.cells.empty()) {
        bounded.id = next_id++;
        rep.zones.push_back(std::move(bounded));
    }

    // zone cover invariant
    std::int64_t covered = 0;
    for (const auto& z : rep.zones) covered += static_cast<std::int64_t>(z.cells.size());
    if (covered != static_cast<std::int64_t>(region.size()))
        throw std::logic_error("build_zone_report: zones do not cover the region exactly once");
    return rep;
}

// --- serialization ---

namespace {

const char* axis_kind_name(AxisKind k) {
    switch (k) {
        case AxisKind::Separated: return "separated";
        case AxisKind::OnAxis: return "on_axis";
        case AxisKind::MeetsFiniteOrder: return "meets_finite_order";
        case AxisKind::UnclassifiedAsymptotic: return "unclassified_asymptotic";
    }
    return "?";
}

const char* zone_kind_name(ZoneKind k) {
    switch (k) {
        case ZoneKind::LargeShell: return "large_shell";
        case ZoneKind::BoundedNoMult: return "bounded_no_mult";
        case ZoneKind::MultNeighborhood: return "mult_neighborhood";
    }
    return "?";
}

nlohmann::json axis_to_json(const AxisBehavior& a) {
    nlohmann::json j;
    j["kind"] = axis_kind_name(a.kind);
    j["delta"] = a.delta;
    if (a.kind == AxisKind::MeetsFiniteOrder) {
        j["s"] = a.s;
        j["c0"] = a.c0;
        j["raw_s"] = a.raw_s;
        if (a.s1) {
            j["s1"] = *a.s1;
            j["c1"] = a.c1;
        }
        j["contact_at_origin"] = a.contact_at_origin;
        j["isolated_point"] = a.isolated_point;
        j["parity_rounded"] = a.parity_rounded;
    }
    j["low_confidence"] = a.low_confidence;
    return j;
}

}  // namespace

std::string ZoneReport::to_json() const {
    nlohmann::json j;
    j["symbol"] = symbol_name;
    j["dimension"] = dim;
    j["order"] = order;
    j["grid_radius"] = grid_radius;
    j["region_restricted"] = region_restricted;
    j["exclusion_radius"] = exclusion_radius;
    j["edge_min_im"] = edge_min_im;
    j["stability"] = {{"pass", stability.pass},
                      {"min_im", stability.min_im},
                      {"argmin_node", stability.argmin_node},
                      {"argmin_label", stability.argmin_label}};
    j["multiplicity_sets"] = nlohmann::json::array();
    for (const auto& ms : mults)
        j["multiplicity_sets"].push_back({{"labels", ms.labels},
                                          {"L", ms.L},
                                          {"ell", ms.codim},
                                          {"codim_slope", ms.codim_slope},
                                          {"cells", ms.cells.size()},
                                          {"contains_axis", ms.contains_axis}});
    j["zones"] = nlohmann::json::array();
    for (const auto& z : zones) {
        nlohmann::json zj;
        zj["id"] = z.id;
        zj["kind"] = zone_kind_name(z.kind);
        zj["cells"] = z.cells.size();
        if (z.kind == ZoneKind::MultNeighborhood) {
            zj["mult_index"] = z.mult_index;
            zj["collective"] = axis_to_json(z.collective);
        }
        zj["roots"] = nlohmann::json::array();
        for (const auto& [k, rc] : z.per_root) {
            nlohmann::json rj;
            rj["label"] = k;
            rj["axis"] = axis_to_json(rc.axis);
            if (rc.hessian) {
                const char* hk = rc.hessian->kind == HessKind::NonDegenerate ? "non_degenerate"
                                 : rc.hessian->kind == HessKind::RankDeficient ? "rank_deficient"
                                                                                : "degenerate";
                rj["hessian"] = {{"kind", hk},
                                 {"M", rc.hessian->M},
                                 {"C0", rc.hessian->C0},
                                 {"rank", rc.hessian->rank},
                                 {"evidence", rc.hessian->evidence},
                                 {"min_abs_det", rc.hessian->min_abs_det},
                                 {"critical_ok", rc.hessian->critical_ok}};
            }
            if (rc.contact) {
                rj["contact"] = {{"convex", rc.contact->convex},
                                 {"gamma", rc.contact->gamma},
                                 {"gamma0", rc.contact->gamma0},
                                 {"infinite_flag", rc.contact->infinite_flag},
                                 {"low_confidence", rc.contact->low_confidence},
                                 {"planes_sampled", rc.contact->planes_sampled}};
            }
            rj["smallxi_ok"] = rc.smallxi_ok;
            zj["roots"].push_back(rj);
        }
        j["zones"].push_back(zj);
    }
    return j.dump(2);
}

std::string ZoneReport::to_text() const {
    std::ostringstream os;
    os << "zone report: " << symbol_name << "  (n=" << dim << ", m=" << order << ")\n";
    os << "stability: " << (stability.pass ? "pass" : "FAIL") << "  min Im tau = "
       << stability.min_im << "\n";
    if (region_restricted)
        os << "region: |xi| > " << exclusion_radius << " (spectral exclusion)\n";
    for (const auto& ms : mults) {
        os << "multiplicity: L=" << ms.L << " ell=" << ms.codim << " cells=" << ms.cells.size()
           << (ms.contains_axis ? " on-axis" : " off-axis") << "\n";
    }
    for (const auto& z : zones) {
        os << "zone " << z.id << " [" << zone_kind_name(z.kind) << "] cells=" << z.cells.size()
           << "\n";
        if (z.kind == ZoneKind::MultNeighborhood) {
            os << "   collective: " << axis_kind_name(z.collective.kind);
            if (z.collective.kind == AxisKind::Separated) os << " delta=" << z.collective.delta;
            if (z.collective.kind == AxisKind::MeetsFiniteOrder) os << " s=" << z.collective.s;
            os << "\n";
            continue;
        }
        for (const auto& [k, rc] : z.per_root) {
            os << "   root " << k << ": " << axis_kind_name(rc.axis.kind);
            if (rc.axis.kind == AxisKind::Separated) os << " delta=" << rc.axis.delta;
            if (rc.axis.kind == AxisKind::MeetsFiniteOrder) {
                os << " s=" << rc.axis.s;
                if (rc.axis.s1) os << " s1=" << *rc.axis.s1;
            }
            if (rc.hessian) {
                os << "  hessian="
                   << (rc.hessian->kind == HessKind::NonDegenerate   ? "nondeg"
                       : rc.hessian->kind == HessKind::RankDeficient ? "rank_n-1"
                                                                     : "degenerate");
                if (rc.hessian->kind == HessKind::NonDegenerate) os << " M=" << rc.hessian->M;
                if (rc.hessian->kind == HessKind::RankDeficient) os << " rank=" << rc.hessian->rank;
            }
            if (rc.contact)
                os << "  gamma=" << rc.contact->gamma << " gamma0=" << rc.contact->gamma0
                   << (rc.contact->convex ? " convex" : " nonconvex");
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace hyperdisp
