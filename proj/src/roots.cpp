#include "hyperdisp/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hyperdisp {

// --- FrequencyGrid ---

std::vector<double> FrequencyGrid::point(std::int64_t node) const {
    if (polar) {
        std::int64_t dir = node / radial.count;
        std::int64_t ir = node % radial.count;
        double r = radial.min + ir * radial.step();
        double th = 2.0 * M_PI * static_cast<double>(dir) / directions;
        return {r * std::cos(th), r * std::sin(th)};
    }
    std::vector<double> x(dim);
    std::int64_t rem = node;
    for (int a = dim - 1; a >= 0; --a) {
        std::int64_t i = rem % axes[a].count;
        rem /= axes[a].count;
        x[a] = axes[a].min + i * axes[a].step();
    }
    return x;
}

std::vector<int> FrequencyGrid::indices(std::int64_t node) const {
    if (polar) throw std::logic_error("FrequencyGrid::indices: cartesian only");
    std::vector<int> idx(dim);
    std::int64_t rem = node;
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(rem % axes[a].count);
        rem /= axes[a].count;
    }
    return idx;
}

std::int64_t FrequencyGrid::node_of(const std::vector<int>& idx) const {
    if (polar) throw std::logic_error("FrequencyGrid::node_of: cartesian only");
    std::int64_t node = 0;
    for (int a = 0; a < dim; ++a) node = node * axes[a].count + idx[a];
    return node;
}

double FrequencyGrid::max_radius() const {
    if (polar) return radial.max;
    double s = 0.0;
    for (const auto& a : axes) {
        double e = std::max(std::abs(a.min), std::abs(a.max));
        s += e * e;
    }
    return std::sqrt(s);
}

double FrequencyGrid::cell_volume() const {
    if (polar) throw std::logic_error("FrequencyGrid::cell_volume: cartesian only");
    double v = 1.0;
    for (const auto& a : axes) v *= a.step();
    return v;
}

// --- polynomial root extraction ---

namespace {

double residual_scale(const TauPolynomial& p, Complex z) {
    const int m = p.degree();
    double az = std::max(1.0, std::abs(z));
    double s = 1.0, pw = 1.0;
    for (int j = m; j >= 0; --j) {
        s += std::abs(p.coeff[j]) * pw;
        pw *= az;
    }
    return s;
}

}  // namespace

std::vector<Complex> solve_roots(const TauPolynomial& p, const std::vector<Complex>* warm,
                                 SolveReport* report) {
    const int m = p.degree();
    if (m < 1) return {};
    if (std::abs(p.coeff[0] - Complex(1.0)) > 1e-12)
        throw std::invalid_argument("solve_roots: polynomial must be monic");
    if (warm && static_cast<int>(warm->size()) != m)
        throw std::invalid_argument("solve_roots: warm start size mismatch");

    std::vector<Complex> z(m);
    if (warm) {
        z = *warm;
        // collapse-proof: nudge coincident warm points apart
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < k; ++l)
                if (std::abs(z[k] - z[l]) < 1e-14 * (1.0 + std::abs(z[k])))
                    z[k] += Complex(1e-9, 1e-9) * (1.0 + std::abs(z[k])) * static_cast<double>(k + 1);
    } else {
        double r = std::max(0.5, p.coefficient_scale());
        for (int k = 0; k < m; ++k) {
            double th = 2.0 * M_PI * k / m + 0.4;
            z[k] = r * Complex(std::cos(th), std::sin(th));
        }
    }

    const int max_iter = 200;
    int it = 0;
    bool done = false;
    for (; it < max_iter && !done; ++it) {
        done = true;
        for (int k = 0; k < m; ++k) {
            Complex pk = p.eval(z[k]);
            if (std::abs(pk) <= 1e-14 * residual_scale(p, z[k])) continue;
            Complex dpk = p.eval_derivative(z[k]);
            if (dpk == Complex(0.0)) dpk = Complex(1e-30, 0.0);
            Complex newton = pk / dpk;
            Complex sum = 0.0;
            for (int l = 0; l < m; ++l) {
                if (l == k) continue;
                Complex d = z[k] - z[l];
                if (std::abs(d) < 1e-300) d = Complex(1e-300, 0.0);
                sum += 1.0 / d;
            }
            Complex denom = 1.0 - newton * sum;
            Complex w = (std::abs(denom) < 1e-30) ? newton : newton / denom;
            z[k] -= w;
            if (std::abs(w) > 1e-15 * (1.0 + std::abs(z[k]))) done = false;
        }
    }

    // Newton polish to machine precision
    for (int k = 0; k < m; ++k)
        for (int step = 0; step < 3; ++step) {
            Complex dpk = p.eval_derivative(z[k]);
            if (std::abs(dpk) < 1e-300) break;
            Complex corr = p.eval(z[k]) / dpk;
            if (std::abs(corr) > 0.5 * (1.0 + std::abs(z[k]))) break;  // near-multiple, keep Aberth value
            z[k] -= corr;
        }

    if (!warm)
        std::sort(z.begin(), z.end(), [](Complex a, Complex b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });

    double max_res = 0.0;
    for (int k = 0; k < m; ++k)
        max_res = std::max(max_res, std::abs(p.eval(z[k])) / residual_scale(p, z[k]));
    bool converged = max_res <= 1e-10;
    if (report) {
        report->converged = converged;
        report->iterations = it;
        report->max_residual = max_res;
    } else if (!converged) {
        throw std::runtime_error("solve_roots: no convergence after iteration cap, residual " +
                                 std::to_string(max_res));
    }
    return z;
}

std::vector<Complex> poly_roots(std::vector<Complex> coeff) {
    double top = 0.0;
    for (Complex c : coeff) top = std::max(top, std::abs(c));
    if (top == 0.0) return {};
    size_t lead = 0;
    while (lead < coeff.size() && std::abs(coeff[lead]) < 1e-14 * top) ++lead;
    coeff.erase(coeff.begin(), coeff.begin() + lead);
    if (coeff.size() <= 1) return {};
    Complex l = coeff[0];
    TauPolynomial p;
    p.coeff.resize(coeff.size());
    for (size_t i = 0; i < coeff.size(); ++i) p.coeff[i] = coeff[i] / l;
    p.coeff[0] = 1.0;
    return solve_roots(p);
}

// --- tracking ---

namespace {

/// Min-total-displacement assignment of new roots to previous labels.
/// Exhaustive for m <= 6, greedy with collision repair above. Returns perm
/// such that label k takes fresh[perm[k]].
std::vector<int> assign_labels(const std::vector<Complex>& prev, const std::vector<Complex>& fresh) {
    const int m = static_cast<int>(prev.size());
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    if (m <= 6) {
        std::vector<int> best = perm;
        double best_cost = 1e300;
        std::vector<int> idx = perm;
        std::sort(idx.begin(), idx.end());
        do {
            double cost = 0.0;
            for (int k = 0; k < m; ++k) cost += std::norm(prev[k] - fresh[idx[k]]);
            if (cost < best_cost - 1e-15 * (1.0 + best_cost)) {
                best_cost = cost;
                best = idx;
            } else if (std::abs(cost - best_cost) <= 1e-15 * (1.0 + best_cost)) {
                // deterministic tie-break: lexicographic on (Re, Im) of displaced root
                for (int k = 0; k < m; ++k) {
                    Complex a = fresh[idx[k]], b = fresh[best[k]];
                    if (a.real() != b.real() || a.imag() != b.imag()) {
                        bool take = a.real() < b.real() ||
                                    (a.real() == b.real() && a.imag() < b.imag());
                        if (take) best = idx;
                        break;
                    }
                }
            }
        } while (std::next_permutation(idx.begin(), idx.end()));
        return best;
    }
    // greedy: repeatedly take the globally closest (label, root) pair
    std::vector<bool> used_prev(m, false), used_fresh(m, false);
    for (int pick = 0; pick < m; ++pick) {
        double best = 1e300;
        int bk = -1, bl = -1;
        for (int k = 0; k < m; ++k) {
            if (used_prev[k]) continue;
            for (int l = 0; l < m; ++l) {
                if (used_fresh[l]) continue;
                double d = std::norm(prev[k] - fresh[l]);
                if (d < best) { best = d; bk = k; bl = l; }
            }
        }
        perm[bk] = bl;
        used_prev[bk] = used_fresh[bl] = true;
    }
    return perm;
}

}  // namespace

RootField track_field(const SymbolSpec& S, const FrequencyGrid& g) {
    S.validate();
    if (g.dim != S.dim) throw std::invalid_argument("track_field: grid dimension mismatch");
    const int m = S.order;
    const std::int64_t N = g.node_count();

    RootField f;
    f.grid = g;
    f.m = m;
    f.roots.resize(N * m);
    f.disc_mag.resize(N);
    f.residual.resize(N);
    f.mult_flag.assign(N, 0);

    // warm-start predecessor in sweep order: previous node along the fastest
    // axis, else the node one step back along the first non-zero slower axis
    auto predecessor = [&](std::int64_t node) -> std::int64_t {
        if (node == 0) return -1;
        if (g.polar) {
            if (node % g.radial.count != 0) return node - 1;
            return node - g.radial.count;  // first node of a new ray: same radius, previous ray
        }
        std::vector<int> idx = g.indices(node);
        for (int a = g.dim - 1; a >= 0; --a) {
            if (idx[a] > 0) {
                std::vector<int> p = idx;
                p[a] -= 1;
                return g.node_of(p);
            }
        }
        return -1;
    };

    double coeff_bound = 1.0;
    for (std::int64_t node = 0; node < N; ++node) {
        TauPolynomial p = evaluate_symbol(S, g.point(node));
        double scale = p.coefficient_scale();
        coeff_bound = std::max(coeff_bound, scale);

        std::int64_t pred = predecessor(node);
        SolveReport rep;
        std::vector<Complex> fresh = solve_roots(p, nullptr, &rep);
        if (pred >= 0) {
            std::vector<Complex> prev(f.roots.begin() + pred * m, f.roots.begin() + (pred + 1) * m);
            std::vector<int> perm = assign_labels(prev, fresh);
            for (int k = 0; k < m; ++k) f.roots[node * m + k] = fresh[perm[k]];
        } else {
            for (int k = 0; k < m; ++k) f.roots[node * m + k] = fresh[k];
        }

        double disc = std::abs(discriminant_of(p));
        f.disc_mag[node] = disc;
        f.residual[node] = rep.max_residual;
        double thresh = 1e-10 * std::pow(scale, 2.0 * m - 2.0);
        if (disc < thresh) f.mult_flag[node] = 1;
    }
    f.coeff_bound = coeff_bound;
    f.mult_threshold = 1e-10 * std::pow(coeff_bound, 2.0 * m - 2.0);
    return f;
}

PrincipalPairing pair_principal(const RootField& field, const SymbolSpec& S) {
    const int m = field.m;
    const std::int64_t N = field.nodes();
    const double R = field.grid.max_radius();

    PrincipalPairing out;
    std::vector<std::vector<int>> votes(m, std::vector<int>(m, 0));
    std::vector<double> dev_inner, dev_outer;  // bands [0.8R,0.9R) and [0.9R,R]
    double sup_dev = 0.0;

    bool any = false;
    for (std::int64_t node = 0; node < N; ++node) {
        std::vector<double> xi = field.grid.point(node);
        double r = 0.0;
        for (double v : xi) r += v * v;
        r = std::sqrt(r);
        if (r < 0.8 * R) continue;
        any = true;
        std::vector<Complex> phi = solve_roots(principal_polynomial(S, xi));
        std::vector<Complex> tau(field.roots.begin() + node * m, field.roots.begin() + (node + 1) * m);
        std::vector<int> perm = assign_labels(tau, phi);
        double node_max = 0.0;
        for (int k = 0; k < m; ++k) {
            votes[k][perm[k]] += 1;
            node_max = std::max(node_max, std::abs(tau[k] - phi[perm[k]]));
        }
        sup_dev = std::max(sup_dev, node_max);
        (r < 0.9 * R ? dev_inner : dev_outer).push_back(node_max);
    }
    if (!any) throw std::runtime_error("pair_principal: grid has no outer-band nodes");

    out.tau_to_phi.resize(m);
    for (int k = 0; k < m; ++k) {
        int best = 0;
        for (int l = 1; l < m; ++l)
            if (votes[k][l] > votes[k][best]) best = l;
        out.tau_to_phi[k] = best;
    }
    out.sup_deviation = sup_dev;

    auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double s = 0.0;
        for (double x : v) s += x;
        return s / v.size();
    };
    double mi = mean(dev_inner), mo = mean(dev_outer);
    out.growth_ratio = (mi > 1e-300) ? mo / mi : 1.0;
    out.bounded = (sup_dev <= 1e-9) || (out.growth_ratio <= 1.25);
    if (!out.bounded)
        throw std::runtime_error(
            "pair_principal: |tau_k - phi_k| grows toward the grid edge (ratio " +
            std::to_string(out.growth_ratio) + "), bounded-deviation property violated");
    return out;
}

double simple_root_scale(const TauPolynomial& p, double rho) {
    const int m = p.degree();
    double s = 0.0, pw = 1.0;  // pw = rho^(m-j-1) built from the low end
    double r = std::max(rho, 1e-30);
    // sum_j (m-j)|c_j| rho^(m-j-1), j = 0..m-1
    for (int j = m - 1; j >= 0; --j) {
        s += (m - j) * std::abs(p.coeff[j]) * pw;
        pw *= r;
    }
    return s;
}

std::string field_to_csv(const RootField& field) {
    std::ostringstream os;
    os.precision(17);
    os << "node";
    for (int i = 0; i < field.grid.dim; ++i) os << ",xi" << i;
    os << ",k,re_tau,im_tau,abs_disc\n";
    for (std::int64_t node = 0; node < field.nodes(); ++node) {
        std::vector<double> xi = field.grid.point(node);
        for (int k = 0; k < field.m; ++k) {
            os << node;
            for (double v : xi) os << "," << v;
            Complex t = field.root(node, k);
            os << "," << k << "," << t.real() << "," << t.imag() << "," << field.disc_mag[node]
               << "\n";
        }
    }
    return os.str();
}

RootJet root_jet(const SymbolSpec& S, const std::vector<double>& xi, Complex seed) {
    TauPolynomial p = evaluate_symbol(S, xi);
    Complex tau = seed;
    for (int step = 0; step < 60; ++step) {
        Complex d = p.eval_derivative(tau);
        if (std::abs(d) < 1e-300) break;
        Complex corr = p.eval(tau) / d;
        tau -= corr;
        if (std::abs(corr) <= 1e-16 * (1.0 + std::abs(tau))) break;
    }

    auto pr = S.partials_at(tau, xi);
    double thresh = 1e-8 * simple_root_scale(p, std::abs(tau));
    if (std::abs(pr.L_tau) < thresh)
        throw std::runtime_error("root_jet: root too close to a multiplicity, |dL/dtau| = " +
                                 std::to_string(std::abs(pr.L_tau)) + " < " +
                                 std::to_string(thresh));

    const int n = S.dim;
    RootJet jet;
    jet.value = tau;
    jet.gradient.resize(n);
    for (int i = 0; i < n; ++i) jet.gradient[i] = -pr.L_xi[i] / pr.L_tau;
    jet.hessian.assign(n, std::vector<Complex>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Complex h = pr.L_xixi[i][j] + pr.L_xitau[i] * jet.gradient[j] +
                        pr.L_xitau[j] * jet.gradient[i] +
                        pr.L_tautau * jet.gradient[i] * jet.gradient[j];
            jet.hessian[i][j] = -h / pr.L_tau;
        }
    return jet;
}

}  // namespace hyperdisp
