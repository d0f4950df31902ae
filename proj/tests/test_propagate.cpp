#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperdisp/corpus.hpp"
#include "hyperdisp/propagate.hpp"
#include "hyperdisp/roots.hpp"

using namespace hyperdisp;
using std::complex_literals::operator""i;

namespace {

Complex ipow(int j) {  // i^j
    static const Complex tab[4] = {1.0, {0.0, 1.0}, -1.0, {0.0, -1.0}};
    return tab[((j % 4) + 4) % 4];
}

}  // namespace

TEST_CASE("companion: spectrum equals the tau-polynomial roots") {
    SymbolSpec w = corpus_get("wave_1d").symbol;
    CMat C = companion(w, {1.0});
    // char poly evaluation: det(tau I - C) must equal p(tau)
    TauPolynomial p = evaluate_symbol(w, {1.0});
    for (Complex tau : {Complex(2.0), Complex(0.0, 1.0), Complex(0.3, -0.7)}) {
        // 2x2 determinant by hand
        Complex det = (tau - C.at(0, 0)) * (tau - C.at(1, 1)) - C.at(0, 1) * C.at(1, 0);
        CHECK(std::abs(det - p.eval(tau)) < 1e-12);
    }

    SymbolSpec dw = corpus_get("dissipative_wave_1d").symbol;
    CMat Cd = companion(dw, {1.0});
    // spectrum {(i +- sqrt(3))/2} via the quadratic oracle, checked through traces
    Complex tr = Cd.at(0, 0) + Cd.at(1, 1);
    Complex det = Cd.at(0, 0) * Cd.at(1, 1) - Cd.at(0, 1) * Cd.at(1, 0);
    Complex r1 = (1.0i + std::sqrt(Complex(3.0))) / 2.0;
    Complex r2 = (1.0i - std::sqrt(Complex(3.0))) / 2.0;
    CHECK(std::abs(tr - (r1 + r2)) < 1e-12);
    CHECK(std::abs(det - r1 * r2) < 1e-12);
}

TEST_CASE("propagator: wave E_1 = sin(t|xi|)/|xi| and E_0 = cos(t|xi|)") {
    SymbolSpec w = corpus_get("wave_1d").symbol;
    for (double t : {0.0, 0.4, 1.7, 9.3}) {
        CMat P = propagator(w, {1.0}, t);
        CHECK(std::abs(P.at(0, 0) - std::cos(t)) < 1e-9);
        CHECK(std::abs(P.at(0, 1) - std::sin(t)) < 1e-9);
    }
    CMat P2 = propagator(w, {2.0}, 1.3);
    CHECK(std::abs(P2.at(0, 1) - std::sin(2.6) / 2.0) < 1e-9);
}

TEST_CASE("propagator: dissipative double root gives the Jordan form t e^{-t/2}") {
    SymbolSpec dw = corpus_get("dissipative_wave_1d").symbol;
    for (double t : {0.5, 2.0, 10.0}) {
        CMat P = propagator(dw, {0.5}, t);
        CHECK(std::abs(P.at(0, 1) - t * std::exp(-t / 2.0)) < 1e-9 * (1.0 + t));
    }
}

TEST_CASE("propagator: Phi(0) = I exactly and semigroup property") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (const auto& name : {"kg_1d", "dissipative_wave_1d", "fp_2_1"}) {
        SymbolSpec S = corpus_get(name).symbol;
        std::vector<double> xi(S.dim, u(rng));
        CMat I = propagator(S, xi, 0.0);
        for (int r = 0; r < I.n; ++r)
            for (int c = 0; c < I.n; ++c)
                CHECK(std::abs(I.at(r, c) - (r == c ? 1.0 : 0.0)) < 1e-13);

        double t = 1.1, s = 2.3;
        CMat A = propagator(S, xi, t);
        CMat B = propagator(S, xi, s);
        CMat AB = A * B;
        CMat C = propagator(S, xi, t + s);
        for (int r = 0; r < C.n; ++r)
            for (int c = 0; c < C.n; ++c) CHECK(std::abs(AB.at(r, c) - C.at(r, c)) < 1e-9);
    }
}

TEST_CASE("propagator: initial-data identity via small-t divided differences") {
    SymbolSpec S = corpus_get("fp_2_1").symbol;  // m = 3
    std::vector<double> xi = {0.7};
    const double h = 1e-6;
    CMat Ph = propagator(S, xi, h);
    CMat P0 = propagator(S, xi, 0.0);
    // d_t^l E_j(0) = delta_lj: row l of (Phi(h) - I)/h approximates row l+1 of I
    for (int j = 0; j < 3; ++j) {
        Complex d = (Ph.at(0, j) - P0.at(0, j)) / h;
        CHECK(std::abs(d - (j == 1 ? 1.0 : 0.0)) < 1e-5);
    }
}

TEST_CASE("propagator: overflow guard names the stability scan") {
    SymbolSpec nm = corpus_get("negative_mass_wave_1d").symbol;
    CHECK_THROWS_WITH_AS(propagator(nm, {0.0}, 2000.0),
                         doctest::Contains("stability_scan"), std::runtime_error);
}

TEST_CASE("vandermonde_amplitudes: m=2 closed forms") {
    Complex t1(0.3, 0.1), t2(-1.2, 0.8);
    std::vector<Complex> A0 = vandermonde_amplitudes({t1, t2}, 0);
    CHECK(std::abs(A0[0] - t2 / (t2 - t1)) < 1e-12);
    CHECK(std::abs(A0[1] - (-t1) / (t2 - t1)) < 1e-12);
    std::vector<Complex> A1 = vandermonde_amplitudes({t1, t2}, 1);
    CHECK(std::abs(A1[0] - 1.0 / (t1 - t2)) < 1e-12);
    CHECK(std::abs(A1[1] - 1.0 / (t2 - t1)) < 1e-12);
}

TEST_CASE("vandermonde_amplitudes: m=3 against a brute-force Vandermonde solve") {
    std::vector<Complex> roots = {1.0, 2.0, 3.0};
    std::vector<Complex> A2 = vandermonde_amplitudes(roots, 2);
    CHECK(std::abs(A2[0] - Complex(0.5)) < 1e-12);
    CHECK(std::abs(A2[1] - Complex(-1.0)) < 1e-12);
    CHECK(std::abs(A2[2] - Complex(0.5)) < 1e-12);

    // oracle: solve V^T A = e_j with V_{lk} = tau_k^l by Gaussian elimination
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        int m = 2 + trial % 4;
        std::vector<Complex> rts(m);
        for (int k = 0; k < m; ++k) rts[k] = Complex(u(rng), u(rng));
        bool clash = false;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                if (std::abs(rts[a] - rts[b]) < 0.2) clash = true;
        if (clash) continue;
        int j = trial % m;
        std::vector<Complex> A = vandermonde_amplitudes(rts, j);
        // direct check of the defining identity sum_k A_k tau_k^l = delta_lj
        for (int l = 0; l < m; ++l) {
            Complex s = 0.0;
            for (int k = 0; k < m; ++k) s += A[k] * std::pow(rts[k], l);
            CHECK(std::abs(s - (l == j ? 1.0 : 0.0)) < 1e-9);
        }
    }
}

TEST_CASE("vandermonde_amplitudes: near-multiple roots rejected") {
    CHECK_THROWS_AS(vandermonde_amplitudes({Complex(1.0), Complex(1.0 + 1e-12)}, 0),
                    std::runtime_error);
}

TEST_CASE("oracle equivalence: Vandermonde sum vs matrix exponential") {
    // Phi_{0,j} = i^{-j} sum_k A_j^k e^{i tau_k t} away from multiplicities
    for (const auto& name : {"kg_1d", "dissipative_wave_1d", "fp_2_1"}) {
        SymbolSpec S = corpus_get(name).symbol;
        for (double x : {0.15, 0.8, 1.9}) {
            std::vector<double> xi(S.dim, x);
            TauPolynomial p = evaluate_symbol(S, xi);
            std::vector<Complex> roots = solve_roots(p);
            double gap = 1e300;
            for (size_t a = 0; a < roots.size(); ++a)
                for (size_t b = a + 1; b < roots.size(); ++b)
                    gap = std::min(gap, std::abs(roots[a] - roots[b]));
            if (gap < 1e-3) continue;
            for (double t : {0.1, 1.0, 10.0}) {
                CMat P = propagator(S, xi, t);
                for (int j = 0; j < S.order; ++j) {
                    std::vector<Complex> A = vandermonde_amplitudes(roots, j);
                    Complex sum = 0.0;
                    for (size_t k = 0; k < roots.size(); ++k)
                        sum += A[k] * std::exp(1.0i * roots[k] * t);
                    Complex expect = sum / ipow(j);
                    CHECK(std::abs(P.at(0, j) - expect) <=
                          1e-8 * std::max(1e-30, std::abs(expect)));
                }
            }
        }
    }
}

TEST_CASE("propagator_row agrees with the full propagator") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const auto& name : {"kg_1d", "dissipative_wave_1d", "fp_2_1"}) {
        SymbolSpec S = corpus_get(name).symbol;
        for (int trial = 0; trial < 8; ++trial) {
            std::vector<double> xi(S.dim, u(rng));
            double t = 0.1 + std::abs(u(rng)) * 5.0;
            TauPolynomial p = evaluate_symbol(S, xi);
            CMat P = propagator(S, xi, t);
            for (int r = 0; r < std::min(2, S.order); ++r) {
                std::vector<Complex> row = propagator_row(p, t, r);
                for (int j = 0; j < S.order; ++j)
                    CHECK(std::abs(row[j] - P.at(r, j)) < 1e-9 * (1.0 + std::abs(P.at(r, j))));
            }
        }
    }
}

TEST_CASE("multiplicity resolution bound near the dissipative double root") {
    SymbolSpec S = corpus_get("dissipative_wave_1d").symbol;
    // C calibrated at t = 0: max_j |sum_k A_j^k| = |sum A_0^k| = 1
    for (double off : {1e-3, 1e-2, 0.05}) {
        std::vector<double> xi = {0.5 + off};
        std::vector<Complex> roots = solve_roots(evaluate_symbol(S, xi));
        std::vector<Complex> A = vandermonde_amplitudes(roots, 1);
        double min_im = std::min(roots[0].imag(), roots[1].imag());
        Complex s0 = A[0] + A[1];
        double C = std::max(1.0, std::abs(s0));
        for (double t : {1.0, 10.0, 100.0}) {
            Complex s = A[0] * std::exp(1.0i * roots[0] * t) +
                        A[1] * std::exp(1.0i * roots[1] * t);
            CHECK(std::abs(s) <= C * (1.0 + t) * std::exp(-t * min_im) * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("time-reversal sanity: |E_j| bounded in t for real-rooted symbols") {
    for (const auto& name : {"wave_1d", "kg_1d"}) {
        SymbolSpec S = corpus_get(name).symbol;
        for (double x : {0.3, 1.1}) {
            std::vector<double> xi = {x};
            TauPolynomial p = evaluate_symbol(S, xi);
            double cap = 0.0;
            for (double t : {1.0, 10.0, 100.0, 400.0}) {
                std::vector<Complex> row = propagator_row(p, t, 0);
                for (Complex v : row) cap = std::max(cap, std::abs(v));
            }
            CHECK(cap <= 1.0 + 1.0 / std::abs(x) + 1e-9);  // |cos| <= 1, |sin(tx)/x| <= 1/x
        }
    }
}

TEST_CASE("synthesize: Parseval and data reproduction at t = 0") {
    SymbolSpec kg = corpus_get("kg_1d").symbol;
    FrequencyGrid g = FrequencyGrid::symmetric(1, 16.0, 1024);
    CauchyData data;
    data.kind = CauchyData::Kind::Gaussian;
    data.sigma = 2.0;
    data.component = 0;
    SynthesisResult r = synthesize(kg, 0, 0.0, g, data);
    CHECK(r.l2_space == doctest::Approx(r.l2_norm).epsilon(1e-10));
    CHECK(r.sup_norm > 0.0);

    // E_0(0) = 1: synthesis at t=0 reproduces the windowed data transform
    SynthesisResult r2 = synthesize(kg, 0, 0.0, g, data, 0.8, 0, nullptr);
    CHECK(r2.sup_norm == doctest::Approx(r.sup_norm).epsilon(1e-12));
}

TEST_CASE("synthesize: aliasing guard fires for undersampled data") {
    SymbolSpec kg = corpus_get("kg_1d").symbol;
    FrequencyGrid g = FrequencyGrid::symmetric(1, 4.0, 256);
    CauchyData wide;
    wide.kind = CauchyData::Kind::Gaussian;
    wide.sigma = 50.0;  // nearly flat: energy at the grid edge
    CHECK_THROWS_AS(synthesize(kg, 0, 0.0, g, wide, 2.0), std::runtime_error);
}

TEST_CASE("synthesize: wave n=1 against a leapfrog finite-difference oracle") {
    SymbolSpec w = corpus_get("wave_1d").symbol;
    FrequencyGrid g = FrequencyGrid::symmetric(1, 16.0, 2048);
    CauchyData data;
    data.kind = CauchyData::Kind::Gaussian;
    data.sigma = 2.0;
    data.component = 1;

    // spatial initial data f: E_0(0) = 1 synthesis of the same profile
    SynthesisResult f0 = synthesize(w, 0, 0.0, g, data);
    const int N = 2048;
    double dxi = g.axes[0].step();
    double dx = 2.0 * M_PI / (N * dxi);
    std::vector<double> f(N);
    for (int i = 0; i < N; ++i) f[i] = f0.values[i].real();

    // u_tt = u_xx with u(0) = 0, u_t(0) = f on the same periodic dual grid
    double t_final = 2.0;
    double dt = 0.2 * dx;
    int steps = static_cast<int>(std::ceil(t_final / dt));
    dt = t_final / steps;
    std::vector<double> um(N, 0.0), u(N), up(N);
    auto lap = [&](const std::vector<double>& v, int i) {
        return (v[(i + 1) % N] - 2.0 * v[i] + v[(i + N - 1) % N]) / (dx * dx);
    };
    for (int i = 0; i < N; ++i) u[i] = dt * f[i];  // u(dt) to O(dt^3)
    for (int s = 1; s < steps; ++s) {
        for (int i = 0; i < N; ++i) up[i] = 2.0 * u[i] - um[i] + dt * dt * lap(u, i);
        um.swap(u);
        u.swap(up);
    }
    SynthesisResult spec = synthesize(w, 1, t_final, g, data);
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < N; ++i) {
        diff = std::max(diff, std::abs(u[i] - spec.values[i].real()));
        scale = std::max(scale, std::abs(spec.values[i].real()));
    }
    CHECK(diff <= 1e-4 * scale * 10.0);  // d'Alembert agreement
}

TEST_CASE("fit_exponent: synthetic power law and exponential") {
    std::vector<std::pair<double, double>> series;
    TimeLadder lad;
    for (double t : lad.times()) series.push_back({t, 3.0 * std::pow(t, -0.5)});
    DecayFit fit = fit_exponent(series, 20.0, 400.0, FitMode::Power);
    CHECK(fit.exponent == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(fit.residual_rms < 1e-10);

    series.clear();
    for (double t : lad.times()) series.push_back({t, 2.0 * std::exp(-0.25 * t)});
    DecayFit ef = fit_exponent(series, 1.0, 400.0, FitMode::Exponential);
    CHECK(ef.exponent == doctest::Approx(0.25).epsilon(1e-6));

    CHECK_THROWS_AS(fit_exponent({{1.0, 1.0}}, 0.5, 2.0, FitMode::Power),
                    std::invalid_argument);

    // non-monotone tail flags low confidence
    series.clear();
    for (double t : lad.times())
        series.push_back({t, std::pow(t, -0.5) * (1.0 + 0.5 * std::sin(t))});
    DecayFit nf = fit_exponent(series, 20.0, 400.0, FitMode::Power);
    CHECK(nf.low_confidence);
}

TEST_CASE("run_decay_experiment: t=0 entry equals the direct data norm") {
    SymbolSpec kg = corpus_get("kg_1d").symbol;
    ExperimentConfig ec;
    ec.grid = FrequencyGrid::symmetric(1, 16.0, 1024);
    ec.ladder = {0.0 + 1e-12, 1.0, 1};  // single time ~ 0
    ec.ladder.t_min = 0.0;
    ec.ladder.count = 1;
    ec.data.kind = CauchyData::Kind::Gaussian;
    ec.data.sigma = 2.0;
    ec.data.component = 0;
    PropagatorRun run = run_decay_experiment(kg, ec);
    REQUIRE(run.entries.size() >= 1);
    SynthesisResult direct = synthesize(kg, 0, 0.0, ec.grid, ec.data);
    for (const auto& e : run.entries)
        if (e.q == "inf") CHECK(e.norm == doctest::Approx(direct.sup_norm).epsilon(1e-12));
}

TEST_CASE("run_decay_experiment: unstable symbol rejected without a cutoff") {
    SymbolSpec nm = corpus_get("negative_mass_wave_1d").symbol;
    ExperimentConfig ec;
    ec.grid = FrequencyGrid::symmetric(1, 4.0, 512);
    ec.data.kind = CauchyData::Kind::Gaussian;
    ec.data.sigma = 2.0;
    CHECK_THROWS_AS(run_decay_experiment(nm, ec), std::runtime_error);
    // with the exclusion ball the run proceeds (conditional experiment)
    ec.data.exclude_ball = 1.0;
    ec.allow_unstable = true;
    ec.ladder = {1.0, 10.0, 6};
    PropagatorRun run = run_decay_experiment(nm, ec);
    CHECK(run.entries.size() >= 6);
}

TEST_CASE("single-row time ladder produces a valid run") {
    SymbolSpec w = corpus_get("wave_1d").symbol;
    ExperimentConfig ec;
    ec.grid = FrequencyGrid::symmetric(1, 8.0, 256);
    ec.ladder = {5.0, 5.0, 1};
    PropagatorRun run = run_decay_experiment(w, ec);
    CHECK(run.times.size() == 1);
    std::string csv = run.to_csv();
    CHECK(csv.find("t,q,r,alpha,norm") == 0);
}
