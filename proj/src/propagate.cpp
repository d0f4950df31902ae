#include "hyperdisp/propagate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hyperdisp/roots.hpp"

namespace hyperdisp {

CMat CMat::identity(int n) {
    CMat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

CMat CMat::operator*(const CMat& o) const {
    CMat out(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            Complex v = at(i, k);
            if (v == Complex(0.0)) continue;
            for (int j = 0; j < n; ++j) out.at(i, j) += v * o.at(k, j);
        }
    return out;
}

double CMat::norm1() const {
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::abs(at(i, j));
        best = std::max(best, s);
    }
    return best;
}

namespace {

/// Physical companion: state (u, d_t u, ..., d_t^{m-1} u), spectrum {i tau_k}.
CMat dt_companion(const TauPolynomial& p) {
    const int m = p.degree();
    CMat C(m);
    for (int l = 0; l + 1 < m; ++l) C.at(l, l + 1) = 1.0;
    // d_t^m u = -sum_j a_j i^j d_t^{m-j} u, column c = m - j
    Complex ipow = 1.0;  // i^(m-c) built incrementally from c=m-1 downward
    for (int c = m - 1; c >= 0; --c) {
        ipow *= Complex(0.0, 1.0);
        C.at(m - 1, c) = -p.coeff[m - c] * ipow;
    }
    return C;
}

/// V - U and V + U solve for the Pade core.
CMat solve_mat(CMat A, CMat B) {  // returns A^{-1} B
    const int n = A.n;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A.at(r, c)) > std::abs(A.at(piv, c))) piv = r;
        if (std::abs(A.at(piv, c)) < 1e-300) throw std::runtime_error("expm: singular Pade solve");
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(A.at(piv, j), A.at(c, j));
                std::swap(B.at(piv, j), B.at(c, j));
            }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            Complex f = A.at(r, c) / A.at(c, c);
            if (f == Complex(0.0)) continue;
            for (int j = c; j < n; ++j) A.at(r, j) -= f * A.at(c, j);
            for (int j = 0; j < n; ++j) B.at(r, j) -= f * B.at(c, j);
        }
    }
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < n; ++j) B.at(r, j) /= A.at(r, r);
    return B;
}

}  // namespace

CMat companion(const SymbolSpec& S, const std::vector<double>& xi) {
    TauPolynomial p = evaluate_symbol(S, xi);
    const int m = p.degree();
    CMat C(m);
    for (int l = 0; l + 1 < m; ++l) C.at(l, l + 1) = 1.0;
    for (int c = 0; c < m; ++c) C.at(m - 1, c) = -p.coeff[m - c];
    return C;
}

CMat expm(const CMat& A) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;
    const int n = A.n;

    double nrm = A.norm1();
    int squarings = 0;
    if (nrm > theta13) squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    CMat As = A;
    double scale = std::pow(2.0, -squarings);
    for (auto& v : As.a) v *= scale;

    CMat I = CMat::identity(n);
    CMat A2 = As * As;
    CMat A4 = A2 * A2;
    CMat A6 = A4 * A2;

    auto lin = [&](double c6, const CMat& M6, double c4, const CMat& M4, double c2,
                   const CMat& M2, double c0, const CMat& M0) {
        CMat out(n);
        for (size_t i = 0; i < out.a.size(); ++i)
            out.a[i] = c6 * M6.a[i] + c4 * M4.a[i] + c2 * M2.a[i] + c0 * M0.a[i];
        return out;
    };

    CMat W1 = lin(b[13], A6, b[11], A4, b[9], A2, 0.0, I);
    CMat W2 = lin(b[7], A6, b[5], A4, b[3], A2, b[1], I);
    CMat W = A6 * W1;
    for (size_t i = 0; i < W.a.size(); ++i) W.a[i] += W2.a[i];
    CMat U = As * W;
    CMat Z1 = lin(b[12], A6, b[10], A4, b[8], A2, 0.0, I);
    CMat V = A6 * Z1;
    for (size_t i = 0; i < V.a.size(); ++i)
        V.a[i] += b[6] * A6.a[i] + b[4] * A4.a[i] + b[2] * A2.a[i] + b[0] * I.a[i];

    CMat P(n), Q(n);
    for (size_t i = 0; i < U.a.size(); ++i) {
        P.a[i] = V.a[i] + U.a[i];
        Q.a[i] = V.a[i] - U.a[i];
    }
    CMat R = solve_mat(std::move(Q), std::move(P));
    for (int s = 0; s < squarings; ++s) R = R * R;
    return R;
}

CMat propagator(const SymbolSpec& S, const std::vector<double>& xi, double t) {
    if (t < 0.0) throw std::invalid_argument("propagator: t must be >= 0");
    TauPolynomial p = evaluate_symbol(S, xi);
    const int m = p.degree();

    // growth guard: strongly unstable symbols overflow e^{t max(-Im tau)}
    std::vector<Complex> roots = solve_roots(p);
    double worst = 0.0;
    for (Complex r : roots) worst = std::max(worst, -r.imag());
    if (worst * t > 600.0)
        throw std::runtime_error(
            "propagator: exponential growth overflow (run stability_scan; min Im tau = " +
            std::to_string(-worst) + ")");

    // balance with D = diag(1, s, s^2, ...) to keep the scaled norm ~ s
    CMat C = dt_companion(p);
    double s = p.coefficient_scale();
    CMat B(m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            B.at(r, c) = C.at(r, c) * std::pow(s, c - r) * t;
    CMat E = expm(B);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) E.at(r, c) *= std::pow(s, r - c);
    return E;
}

std::vector<Complex> propagator_row(const TauPolynomial& p, double t, int r) {
    const int m = p.degree();
    if (m == 2) {
        // e^{tC} for the 2x2 physical companion in closed form:
        // C = [[0,1],[w, z]], eigен mu +- d
        Complex a1 = p.coeff[1], a2 = p.coeff[2];
        Complex w = -a2 * Complex(-1.0, 0.0);  // -a2 * i^2
        Complex z = -a1 * Complex(0.0, 1.0);
        Complex mu = 0.5 * z;
        Complex d = std::sqrt(mu * mu + w);
        // e^{tC} = e^{t mu} [cosh(td) I + sinch(td) t (C - mu I)]
        Complex ep = std::exp(t * (mu + d)), em = std::exp(t * (mu - d));
        Complex ch = 0.5 * (ep + em);
        Complex sh_over_d;  // e^{t mu} sinh(t d)/d
        if (std::abs(t * d) < 1e-5) {
            Complex td = t * d;
            sh_over_d = std::exp(t * mu) * t * (1.0 + td * td / 6.0);
        } else {
            sh_over_d = 0.5 * (ep - em) / d;
        }
        // row 0: [ch - mu*sh, sh]; row 1 = d/dt row 0 = [w*sh, ch + mu*sh]
        Complex e00 = ch - mu * sh_over_d;
        Complex e01 = sh_over_d;
        Complex e10 = w * sh_over_d;
        Complex e11 = ch + mu * sh_over_d;
        if (r == 0) return {e00, e01};
        if (r == 1) return {e10, e11};
        // higher derivatives: left-multiplying by C maps [r0,r1] -> [w r1, r0 + z r1]
        Complex r0 = e10, r1 = e11;
        for (int k = 1; k < r; ++k) {
            Complex n0 = w * r1;
            Complex n1 = r0 + z * r1;
            r0 = n0;
            r1 = n1;
        }
        return {r0, r1};
    }
    CMat C = dt_companion(p);
    double s = p.coefficient_scale();
    CMat B(m);
    for (int rr = 0; rr < m; ++rr)
        for (int c = 0; c < m; ++c) B.at(rr, c) = C.at(rr, c) * std::pow(s, c - rr) * t;
    CMat E = expm(B);
    for (int rr = 0; rr < m; ++rr)
        for (int c = 0; c < m; ++c) E.at(rr, c) *= std::pow(s, rr - c);
    if (r < m) {
        std::vector<Complex> row(m);
        for (int c = 0; c < m; ++c) row[c] = E.at(r, c);
        return row;
    }
    CMat P = E;
    for (int k = m - 1; k < r; ++k) P = C * P;  // extra time derivatives
    std::vector<Complex> row(m);
    for (int c = 0; c < m; ++c) row[c] = P.at(m - 1, c);
    return row;
}

std::vector<Complex> vandermonde_amplitudes(const std::vector<Complex>& roots, int j,
                                            double gap_threshold) {
    const int m = static_cast<int>(roots.size());
    if (j < 0 || j >= m) throw std::invalid_argument("vandermonde_amplitudes: bad j");
    double scale = 1.0;
    for (Complex r : roots) scale = std::max(scale, std::abs(r));
    double thresh = gap_threshold > 0.0 ? gap_threshold : 1e-8 * scale;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            if (std::abs(roots[a] - roots[b]) < thresh)
                throw std::runtime_error(
                    "vandermonde_amplitudes: near-multiple roots (gap below threshold), "
                    "use the matrix-exponential propagator instead");

    std::vector<Complex> A(m);
    for (int k = 0; k < m; ++k) {
        // prod_{l != k} (x - tau_l) = sum_i (-1)^i e_i x^{m-1-i}
        std::vector<Complex> c(1, 1.0);
        for (int l = 0; l < m; ++l) {
            if (l == k) continue;
            c.push_back(0.0);
            for (int i = static_cast<int>(c.size()) - 1; i >= 1; --i)
                c[i] = c[i] - roots[l] * c[i - 1];
        }
        // e_{m-1-j} of the remaining roots
        int idx = m - 1 - j;
        Complex e = c[idx] * ((idx % 2 == 0) ? 1.0 : -1.0);
        Complex denom = 1.0;
        for (int l = 0; l < m; ++l)
            if (l != k) denom *= roots[l] - roots[k];
        A[k] = ((j % 2 == 0) ? 1.0 : -1.0) * e / denom;
    }
    return A;
}

// --- data profiles and synthesis ---

double CauchyData::value(const std::vector<double>& xi) const {
    double r = 0.0;
    for (double v : xi) r += v * v;
    r = std::sqrt(r);
    if (exclude_ball > 0.0 && r <= exclude_ball) return 0.0;
    switch (kind) {
        case Kind::Unit: return 1.0;
        case Kind::Gaussian: return std::exp(-r * r / (2.0 * sigma * sigma));
        case Kind::IndicatorBand: return r <= r0 ? 1.0 : 0.0;
        case Kind::RingBand: return std::abs(r - r0) <= 0.5 * width ? 1.0 : 0.0;
    }
    return 0.0;
}

namespace {

/// C-infinity radial bump: 1 at 0, 0 outside radius R.
double bump_window(double r, double R) {
    double s = r / R;
    if (s >= 1.0) return 0.0;
    return std::exp(-s * s / (1.0 - s * s));
}

int env_threads() {
    const char* env = std::getenv("HYPERDISP_THREADS");
    if (!env) return 1;
    int v = std::atoi(env);
    return v > 0 ? v : 1;
}

void parallel_nodes(std::int64_t N, int threads, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (threads <= 1) {
        fn(0, N);
        return;
    }
    std::vector<std::thread> pool;
    std::int64_t chunk = (N + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        std::int64_t lo = t * chunk, hi = std::min(N, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

struct FrequencyPayload {
    std::vector<Complex> F;   // integrand on the grid
    double edge_energy = 0.0;
    double total_energy = 0.0;
};

/// u(x_p) = (2pi)^{-n} dV e^{i x_p . xi_min} IDFT[F]_p on the dual grid.
SynthesisResult inverse_transform(const FrequencyGrid& grid, std::vector<Complex> F) {
    const int n = grid.dim;
    SynthesisResult out;
    double dvol = grid.cell_volume();
    double norm = dvol / std::pow(2.0 * M_PI, n);

    // frequency-side L2 (Parseval)
    double e2 = 0.0;
    for (const Complex& v : F) e2 += std::norm(v);
    out.l2_norm = std::sqrt(e2 * dvol / std::pow(2.0 * M_PI, n));

    std::vector<int> dims(n);
    for (int i = 0; i < n; ++i) dims[i] = grid.axes[i].count;
    fftw_complex* buf = reinterpret_cast<fftw_complex*>(F.data());
    fftw_plan plan = fftw_plan_dft(n, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    // applying the e^{i x_p . xi_min} phase does not change norms; skip it and
    // report magnitudes on the dual grid
    out.values = std::move(F);
    double sup = 0.0, s2 = 0.0;
    for (const Complex& v : out.values) {
        double a = std::abs(v);
        sup = std::max(sup, a);
        s2 += a * a;
    }
    out.sup_norm = sup * norm;
    double dx_total = 1.0;
    for (int i = 0; i < n; ++i) dx_total *= 2.0 * M_PI / (grid.axes[i].count * grid.axes[i].step());
    out.l2_space = std::sqrt(s2 * dx_total) * norm;
    out.dx = std::pow(dx_total, 1.0 / n);
    for (auto& v : out.values) v *= norm;
    return out;
}

void aliasing_check(const FrequencyGrid& grid, const std::vector<Complex>& F) {
    const int n = grid.dim;
    double edge = 0.0, total = 0.0;
    for (std::int64_t node = 0; node < grid.node_count(); ++node) {
        double e = std::norm(F[node]);
        total += e;
        std::vector<int> idx = grid.indices(node);
        for (int i = 0; i < n; ++i)
            if (idx[i] < 2 || idx[i] >= grid.axes[i].count - 2) {
                edge += e;
                break;
            }
    }
    if (total > 0.0 && edge > 1e-6 * total)
        throw std::runtime_error(
            "synthesize: frequency content within two cells of the grid edge exceeds 1e-6 "
            "of the total (aliasing)");
}

}  // namespace

SynthesisResult synthesize(const SymbolSpec& S, int j, double t, const FrequencyGrid& grid,
                           const CauchyData& data, double window_fraction, int r,
                           const MultiIndex* alpha) {
    if (grid.polar) throw std::invalid_argument("synthesize: cartesian grid required");
    const int n = grid.dim;
    if (n != S.dim) throw std::invalid_argument("synthesize: grid dimension mismatch");
    const std::int64_t N = grid.node_count();
    double Rw = 1e300;
    for (const auto& ax : grid.axes)
        Rw = std::min(Rw, window_fraction * std::max(std::abs(ax.min), std::abs(ax.max)));

    std::vector<Complex> F(N, 0.0);
    int threads = env_threads();
    parallel_nodes(N, threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t node = lo; node < hi; ++node) {
            std::vector<double> xi = grid.point(node);
            double rr = 0.0;
            for (double v : xi) rr += v * v;
            rr = std::sqrt(rr);
            double amp = data.value(xi) * bump_window(rr, Rw);
            if (amp == 0.0) continue;
            if (alpha)
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < (*alpha)[i]; ++k) amp *= xi[i];
            TauPolynomial p = evaluate_symbol(S, xi);
            std::vector<Complex> row = propagator_row(p, t, r);
            F[node] = row[j] * amp;
        }
    });

    aliasing_check(grid, F);
    return inverse_transform(grid, std::move(F));
}

std::vector<double> TimeLadder::times() const {
    std::vector<double> ts;
    if (count == 1) {
        ts.push_back(t_min);
        return ts;
    }
    double ratio = t_max / t_min;
    for (int i = 0; i < count; ++i) ts.push_back(t_min * std::pow(ratio, double(i) / (count - 1)));
    return ts;
}

std::vector<std::pair<double, double>> PropagatorRun::series(const std::string& q, int r,
                                                             int alpha_abs) const {
    std::vector<std::pair<double, double>> s;
    for (const auto& e : entries)
        if (e.q == q && e.r == r && e.alpha_abs == alpha_abs) s.push_back({e.t, e.norm});
    return s;
}

std::string PropagatorRun::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,q,r,alpha,norm\n";
    for (const auto& e : entries)
        os << e.t << "," << e.q << "," << e.r << "," << e.alpha_abs << "," << e.norm << "\n";
    return os.str();
}

PropagatorRun run_decay_experiment(const SymbolSpec& S, const ExperimentConfig& cfg) {
    if (cfg.grid.polar) throw std::invalid_argument("run_decay_experiment: cartesian grid required");
    const std::int64_t N = cfg.grid.node_count();
    const int n = cfg.grid.dim;
    const int m = S.order;

    PropagatorRun run;
    run.symbol = S.name;
    run.grid = cfg.grid;
    run.times = cfg.ladder.times();
    run.component = cfg.data.component >= 0 ? cfg.data.component : m - 1;
    run.kernel = cfg.data.kind == CauchyData::Kind::Unit;
    if (run.component >= m) throw std::invalid_argument("run_decay_experiment: component >= m");

    double Rw = 1e300;
    for (const auto& ax : cfg.grid.axes)
        Rw = std::min(Rw, cfg.window_fraction * std::max(std::abs(ax.min), std::abs(ax.max)));

    // precompute per-node polynomial and amplitude; check stability on support
    std::vector<TauPolynomial> polys(N);
    std::vector<double> amps(N);
    double min_im_support = 1e300;
    for (std::int64_t node = 0; node < N; ++node) {
        std::vector<double> xi = cfg.grid.point(node);
        double rr = 0.0;
        for (double v : xi) rr += v * v;
        rr = std::sqrt(rr);
        double amp = cfg.data.value(xi) * bump_window(rr, Rw);
        amps[node] = amp;
        if (amp != 0.0) {
            polys[node] = evaluate_symbol(S, xi);
            for (Complex root : solve_roots(polys[node]))
                min_im_support = std::min(min_im_support, root.imag());
        }
    }
    if (min_im_support < -1e-6 && !cfg.allow_unstable)
        throw std::runtime_error(
            "run_decay_experiment: symbol unstable on the data support (min Im tau = " +
            std::to_string(min_im_support) + "); run stability_scan / add a spectral cutoff");

    std::vector<std::pair<int, MultiIndex>> derivs = cfg.derivatives;
    if (derivs.empty()) derivs.push_back({0, MultiIndex(n, 0)});

    int threads = cfg.threads > 0 ? cfg.threads : env_threads();

    for (double t : run.times) {
        if (min_im_support < 0.0 && -min_im_support * t > 600.0)
            throw std::runtime_error("run_decay_experiment: overflow at t = " + std::to_string(t));
        // distinct r values needed at this time step
        std::vector<int> rvals;
        for (const auto& d : derivs)
            if (std::find(rvals.begin(), rvals.end(), d.first) == rvals.end())
                rvals.push_back(d.first);

        std::map<int, std::vector<Complex>> evals;  // r -> per-node E value
        for (int r : rvals) evals[r] = std::vector<Complex>(N, 0.0);
        parallel_nodes(N, threads, [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t node = lo; node < hi; ++node) {
                if (amps[node] == 0.0) continue;
                for (int r : rvals) {
                    std::vector<Complex> row = propagator_row(polys[node], t, r);
                    evals[r][node] = row[run.component];
                }
            }
        });

        for (const auto& [r, alpha] : derivs) {
            std::vector<Complex> F(N, 0.0);
            for (std::int64_t node = 0; node < N; ++node) {
                if (amps[node] == 0.0) continue;
                double a = amps[node];
                std::vector<double> xi = cfg.grid.point(node);
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < alpha[i]; ++k) a *= xi[i];
                F[node] = evals[r][node] * a;
            }
            aliasing_check(cfg.grid, F);
            int aa = abs_index(alpha);
            if (cfg.measure_sup) {
                SynthesisResult syn = inverse_transform(cfg.grid, F);
                run.entries.push_back({t, "inf", r, aa, syn.sup_norm});
                if (cfg.measure_l2) run.entries.push_back({t, "2", r, aa, syn.l2_norm});
            } else if (cfg.measure_l2) {
                double e2 = 0.0;
                for (const Complex& v : F) e2 += std::norm(v);
                double l2 = std::sqrt(e2 * cfg.grid.cell_volume() / std::pow(2.0 * M_PI, n));
                run.entries.push_back({t, "2", r, aa, l2});
            }
        }
    }
    return run;
}

DecayFit fit_exponent(const std::vector<std::pair<double, double>>& series, double window_lo,
                      double window_hi, FitMode mode) {
    DecayFit fit;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    std::vector<double> x, y;
    double prev = -1.0;
    for (const auto& [t, v] : series) {
        if (t < window_lo || t > window_hi || v <= 0.0) continue;
        x.push_back(mode == FitMode::Power ? std::log(t) : t);
        y.push_back(std::log(v));
        if (prev > 0.0 && v > 1.2 * prev) fit.low_confidence = true;  // non-monotone tail
        prev = v;
    }
    fit.points = static_cast<int>(x.size());
    if (fit.points < 6)
        throw std::invalid_argument("fit_exponent: need at least 6 samples in the window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int c = fit.points;
    for (int i = 0; i < c; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = c * sxx - sx * sx;
    double slope = (c * sxy - sx * sy) / det;
    double intercept = (sy - slope * sx) / c;
    double rss = 0.0;
    for (int i = 0; i < c; ++i) {
        double rr = y[i] - intercept - slope * x[i];
        rss += rr * rr;
    }
    fit.residual_rms = std::sqrt(rss / c);
    double sxx_c = sxx - sx * sx / c;
    fit.half_width = (c > 2 && sxx_c > 0) ? std::sqrt(rss / (c - 2) / sxx_c) : 0.0;
    fit.exponent = -slope;  // positive = decay
    return fit;
}

}  // namespace hyperdisp
