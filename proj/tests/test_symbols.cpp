#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperdisp/corpus.hpp"
#include "hyperdisp/roots.hpp"
#include "hyperdisp/symbol.hpp"

using namespace hyperdisp;
using std::complex_literals::operator""i;

namespace {

bool cnear(Complex a, Complex b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

/// quadratic-formula discriminant oracle for monic tau^2 + b tau + c
Complex quad_disc(Complex b, Complex c) { return b * b - 4.0 * c; }

}  // namespace

TEST_CASE("evaluate_symbol: second-order examples") {
    SymbolSpec dw = corpus_get("dissipative_wave_1d").symbol;
    TauPolynomial p = evaluate_symbol(dw, {1.0});
    REQUIRE(p.degree() == 2);
    CHECK(cnear(p.coeff[0], 1.0));
    CHECK(cnear(p.coeff[1], -1.0i));
    CHECK(cnear(p.coeff[2], -1.0));  // tau^2 - i tau - 1

    SymbolSpec kg = corpus_get("kg_1d").symbol;
    TauPolynomial q = evaluate_symbol(kg, {0.0});
    CHECK(cnear(q.coeff[1], 0.0));
    CHECK(cnear(q.coeff[2], -1.0));  // tau^2 - 1

    SymbolSpec w2 = corpus_get("wave_2d").symbol;
    TauPolynomial r = evaluate_symbol(w2, {3.0, 4.0});
    CHECK(cnear(r.coeff[2], -25.0));  // tau^2 - 25
}

TEST_CASE("evaluate_symbol: dimension mismatch") {
    SymbolSpec kg = corpus_get("kg_1d").symbol;
    CHECK_THROWS_AS(evaluate_symbol(kg, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_symbol(kg, {std::nan("")}), std::invalid_argument);
}

TEST_CASE("principal_polynomial drops lower terms") {
    SymbolSpec dw = corpus_get("dissipative_wave_1d").symbol;
    TauPolynomial p = principal_polynomial(dw, {1.0});
    CHECK(cnear(p.coeff[1], 0.0));
    CHECK(cnear(p.coeff[2], -1.0));  // tau^2 - 1

    SymbolSpec kg = corpus_get("kg_1d").symbol;
    TauPolynomial q = principal_polynomial(kg, {2.0});
    CHECK(cnear(q.coeff[2], -4.0));
}

TEST_CASE("principal_polynomial: Grad 13-moment at (1,0) restricts to Q9") {
    SymbolSpec g = corpus_get("grad13_2d").symbol;
    REQUIRE(g.order == 9);
    REQUIRE(g.dim == 2);
    TauPolynomial p = principal_polynomial(g, {1.0, 0.0});
    // Q9(tau,(1,0)) = tau^9 - 103/25 tau^7 + 21/5 tau^5 - 27/25 tau^3 (alpha*beta = 0)
    CHECK(cnear(p.coeff[0], 1.0));
    CHECK(cnear(p.coeff[2], -103.0 / 25.0, 1e-12));
    CHECK(cnear(p.coeff[4], 21.0 / 5.0, 1e-12));
    CHECK(cnear(p.coeff[6], -27.0 / 25.0, 1e-12));
    for (int j : {1, 3, 5, 7, 8, 9}) CHECK(cnear(p.coeff[j], 0.0));
}

TEST_CASE("discriminant: quadratic oracle") {
    SymbolSpec dw = corpus_get("dissipative_wave_1d").symbol;
    // |xi| = 1/2: oracle (-i)^2 - 4(-1/4) = 0
    CHECK(cnear(quad_disc(-1.0i, Complex(-0.25)), 0.0));
    CHECK(std::abs(discriminant_at(dw, {0.5})) < 1e-12);

    SymbolSpec w = corpus_get("wave_1d").symbol;
    CHECK(cnear(discriminant_at(w, {1.0}), 4.0));  // 0^2 - 4(-1)

    // random quadratics agree with the b^2 - 4c oracle
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        Complex b(u(rng), u(rng)), c(u(rng), u(rng));
        TauPolynomial p;
        p.coeff = {1.0, b, c};
        CHECK(cnear(discriminant_of(p), quad_disc(b, c), 1e-10));
    }
}

TEST_CASE("discriminant: cubic against the root-product route") {
    // (tau-1)(tau-2)(tau-3): prod_{i<j} (tau_i - tau_j)^2 = (1*2*1)^2 = 4
    TauPolynomial p;
    p.coeff = {1.0, -6.0, 11.0, -6.0};
    CHECK(cnear(discriminant_of(p), 4.0, 1e-9));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 25; ++trial) {
        TauPolynomial q;
        q.coeff = {1.0, Complex(u(rng), u(rng)), Complex(u(rng), u(rng)),
                   Complex(u(rng), u(rng))};
        std::vector<Complex> roots = solve_roots(q);
        Complex prod = 1.0;
        for (size_t a = 0; a < roots.size(); ++a)
            for (size_t b = a + 1; b < roots.size(); ++b) {
                Complex d = roots[a] - roots[b];
                prod *= d * d;
            }
        CHECK(std::abs(discriminant_of(q) - prod) < 1e-7 * (1.0 + std::abs(prod)));
    }
}

TEST_CASE("discriminant nonzero at distinct-root samples") {
    SymbolSpec kg = corpus_get("kg_1d").symbol;
    for (double xi : {0.0, 0.3, 1.7}) CHECK(std::abs(discriminant_at(kg, {xi})) > 1e-6);
}

TEST_CASE("necessary_stability_check") {
    auto dw = corpus_get("dissipative_wave_1d").symbol;
    auto v = necessary_stability_check(dw);
    CHECK(v.pass);
    CHECK(v.im_c0m1 == doctest::Approx(-1.0));

    SymbolSpec anti = dw;
    anti.lower[0].c = 1.0i;  // sign-flipped dissipation
    auto va = necessary_stability_check(anti);
    CHECK_FALSE(va.pass);
    CHECK(va.im_c0m1 == doctest::Approx(1.0));

    auto w = corpus_get("wave_2d").symbol;
    auto vw = necessary_stability_check(w);
    CHECK(vw.pass);
    CHECK(vw.all_real_note);  // coefficient absent: roots must all be real
}

TEST_CASE("system_dispersion examples") {
    // A = [[0, xi],[xi, 0]] -> tau^2 - xi^2
    std::vector<std::vector<SystemEntry>> A(2, std::vector<SystemEntry>(2));
    for (auto& row : A)
        for (auto& e : row) e.linear = MonomialPoly(1);
    A[0][1].linear = MonomialPoly::variable(1, 0);
    A[1][0].linear = MonomialPoly::variable(1, 0);
    SymbolSpec S = system_dispersion(A, 1);
    CHECK(S.order == 2);
    TauPolynomial p = evaluate_symbol(S, {3.0});
    CHECK(cnear(p.coeff[1], 0.0));
    CHECK(cnear(p.coeff[2], -9.0));

    // diag(xi, 2 xi) -> tau^2 - 3 xi tau + 2 xi^2
    std::vector<std::vector<SystemEntry>> D(2, std::vector<SystemEntry>(2));
    for (auto& row : D)
        for (auto& e : row) e.linear = MonomialPoly(1);
    D[0][0].linear = MonomialPoly::variable(1, 0);
    D[1][1].linear = MonomialPoly::variable(1, 0, 2.0);
    SymbolSpec Sd = system_dispersion(D, 1);
    TauPolynomial q = evaluate_symbol(Sd, {1.0});
    CHECK(cnear(q.coeff[1], -3.0));
    CHECK(cnear(q.coeff[2], 2.0));
}

TEST_CASE("system_dispersion: roots equal eigenvalues of A(xi)") {
    // 2x2 with constant part: hand-expanded determinant oracle
    std::vector<std::vector<SystemEntry>> A(2, std::vector<SystemEntry>(2));
    for (auto& row : A)
        for (auto& e : row) e.linear = MonomialPoly(1);
    A[0][1].linear = MonomialPoly::variable(1, 0);
    A[1][0].linear = MonomialPoly::variable(1, 0);
    A[1][1].constant = Complex(0.0, 1.0);
    SymbolSpec S = system_dispersion(A, 1);
    for (double xi : {0.4, 1.3}) {
        // det(tau I - A) = tau(tau - i) - xi^2 by hand
        TauPolynomial p = evaluate_symbol(S, {xi});
        CHECK(cnear(p.coeff[1], -1.0i));
        CHECK(cnear(p.coeff[2], -xi * xi));
        // roots vs eigenvalues: lambda^2 - i lambda - xi^2 = 0
        std::vector<Complex> r = solve_roots(p);
        Complex disc = std::sqrt(Complex(-1.0 + 4.0 * xi * xi));
        Complex e1 = (1.0i + disc) / 2.0, e2 = (1.0i - disc) / 2.0;
        double err = std::min(std::abs(r[0] - e1) + std::abs(r[1] - e2),
                              std::abs(r[0] - e2) + std::abs(r[1] - e1));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("fokker_planck_symbol N=1 n=1 is tau^2 - i tau - xi^2") {
    FokkerPlanckSystem fp = fokker_planck_symbol(1, 1);
    REQUIRE(fp.symbol.order == 2);
    TauPolynomial p = evaluate_symbol(fp.symbol, {0.7});
    CHECK(cnear(p.coeff[1], -1.0i));
    CHECK(cnear(p.coeff[2], -0.49));
    // P(tau, 0) = tau (tau - i)
    TauPolynomial p0 = evaluate_symbol(fp.symbol, {0.0});
    CHECK(cnear(p0.coeff[1], -1.0i));
    CHECK(cnear(p0.coeff[2], 0.0));
    CHECK(fp.gamma == std::vector<int>{1});
}

TEST_CASE("fokker_planck_symbol N=2 n=1: P(tau,0) = tau prod (tau - ji)^gamma_j") {
    FokkerPlanckSystem fp = fokker_planck_symbol(2, 1);
    REQUIRE(fp.symbol.order == 3);
    CHECK(fp.gamma == std::vector<int>{1, 1});
    std::vector<Complex> r = solve_roots(evaluate_symbol(fp.symbol, {0.0}));
    // eigenvalues of iB: {0, i, 2i}
    std::vector<Complex> expect = {0.0, 1.0i, 2.0i};
    for (Complex e : expect) {
        double best = 1e300;
        for (Complex x : r) best = std::min(best, std::abs(x - e));
        CHECK(best < 1e-9);
    }
    // single characteristic root at the origin (multiplicity exactly 1)
    int at_zero = 0;
    for (Complex x : r)
        if (std::abs(x) < 1e-9) ++at_zero;
    CHECK(at_zero == 1);
}

TEST_CASE("fokker_planck: Im of tau^{m-1} coefficient equals -trace(B)") {
    for (auto [N, n] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
        FokkerPlanckSystem fp = fokker_planck_symbol(N, n);
        double traceB = 0.0;
        for (size_t i = 0; i < fp.basis.size(); ++i) traceB += fp.B[i][i];
        Complex c0m1 = 0.0;
        for (const auto& t : fp.symbol.lower)
            if (t.r == fp.symbol.order - 1 && abs_index(t.alpha) == 0) c0m1 += t.c;
        CHECK(c0m1.imag() == doctest::Approx(-traceB).epsilon(1e-12));
        CHECK(necessary_stability_check(fp.symbol).pass);
    }
}

TEST_CASE("interlacing_check") {
    CHECK(interlacing_check({-1.0, 1.0}, {0.0}));
    CHECK_FALSE(interlacing_check({-1.0, 1.0}, {2.0}));
    CHECK_THROWS_AS(interlacing_check({-1.0, 1.0}, {0.0, 1.0}), std::invalid_argument);
    // strict variant
    CHECK(interlacing_check({-1.0, 1.0}, {0.0}, true));
    CHECK_FALSE(interlacing_check({-1.0, 1.0}, {1.0}, true));
}

TEST_CASE("interlacing of L_m and its tau-derivative (classical)") {
    // strictly hyperbolic principal symbol at xi != 0; oracle = direct solve
    SymbolSpec g = corpus_get("fp_2_1").symbol;  // principal tau^3 - 3 xi^2 tau
    for (double xi : {0.5, 1.2}) {
        TauPolynomial p = principal_polynomial(g, {xi});
        std::vector<double> rp, rq;
        for (Complex z : solve_roots(p)) rp.push_back(z.real());
        TauPolynomial dp = p.derivative();
        std::vector<Complex> dcoef(dp.coeff.begin(), dp.coeff.end());
        for (Complex z : poly_roots(dcoef)) rq.push_back(z.real());
        std::sort(rp.begin(), rp.end());
        std::sort(rq.begin(), rq.end());
        CHECK(interlacing_check(rp, rq));
    }
}

TEST_CASE("hermite_triple_check") {
    const int n = 1;
    MonomialPoly L2(n + 1), L1(n + 1), L0(n + 1), L1anti(n + 1);
    L2.add_term({2, 0}, 1.0);
    L2.add_term({0, 2}, -1.0);  // tau^2 - xi^2
    L1.add_term({1, 0}, 1.0);   // tau (dissipation)
    L1anti.add_term({1, 0}, -1.0);
    L0.add_term({0, 0}, -1.0);  // -mu^2

    // dissipative triple at xi=1: oracle roots of tau^2 - i tau - 1 have Im = 1/2
    TripleVerdict ok = hermite_triple_check(L2, L1, MonomialPoly(n + 1), {1.0});
    CHECK(ok.pass);
    CHECK(ok.min_im == doctest::Approx(0.5).epsilon(1e-9));

    // Klein-Gordon as L2 + L0, L1 == 0: real roots at xi=1 (tau^2 - 1 + 1 = tau^2)
    TripleVerdict kg = hermite_triple_check(L2, MonomialPoly(n + 1), L0, {1.0});
    CHECK(kg.pass);

    // anti-dissipative: sign-flipped middle polynomial fails stability
    TripleVerdict bad = hermite_triple_check(L2, L1anti, MonomialPoly(n + 1), {1.0});
    CHECK_FALSE(bad.pass);
    CHECK(bad.min_im == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("homogeneity property: P_j(lambda xi) = lambda^j P_j(xi)") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (const auto& name : corpus_names()) {
        SymbolSpec S = corpus_get(name).symbol;
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> xi(S.dim), lxi(S.dim);
            double lambda = u(rng);
            for (int i = 0; i < S.dim; ++i) {
                xi[i] = u(rng) - 1.5;
                lxi[i] = lambda * xi[i];
            }
            for (int j = 1; j <= S.order; ++j) {
                Complex a = S.principal[j - 1].evaluate(lxi);
                Complex b = S.principal[j - 1].evaluate(xi) * std::pow(lambda, j);
                CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
            }
        }
    }
}

TEST_CASE("residual certification on corpus symbols") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const auto& name : corpus_names()) {
        SymbolSpec S = corpus_get(name).symbol;
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> xi(S.dim);
            for (int i = 0; i < S.dim; ++i) xi[i] = u(rng);
            TauPolynomial p = evaluate_symbol(S, xi);
            double budget = 1e-7 * (1.0 + p.coefficient_abs_sum());
            for (Complex root : solve_roots(p)) CHECK(std::abs(p.eval(root)) <= budget);
        }
    }
}

TEST_CASE("discriminant threshold matches small root gaps (cross-module)") {
    SymbolSpec dw = corpus_get("dissipative_wave_1d").symbol;
    const int m = dw.order;
    for (double xi : {0.1, 0.3, 0.499, 0.501, 0.9, 1.5}) {
        TauPolynomial p = evaluate_symbol(dw, {xi});
        double disc = std::abs(discriminant_of(p));
        std::vector<Complex> r = solve_roots(p);
        double gap = std::abs(r[0] - r[1]);
        double scale = p.coefficient_scale();
        double dthresh = 1e-10 * std::pow(scale, 2.0 * m - 2.0);
        double gthresh = std::pow(dthresh, 1.0 / (m * (m - 1)));
        CHECK((disc < dthresh) == (gap < gthresh));
    }
}

TEST_CASE("symbol JSON round trip") {
    for (const auto& name : {"kg_1d", "grad13_2d", "fp_2_1"}) {
        SymbolSpec S = corpus_get(name).symbol;
        std::string js = symbol_to_json(S);
        SymbolSpec T = symbol_from_json(js, S.name);
        CHECK(symbol_to_json(T) == js);  // byte-stable round trip
        std::vector<double> xi(S.dim, 0.37);
        TauPolynomial a = evaluate_symbol(S, xi), b = evaluate_symbol(T, xi);
        for (int j = 0; j <= S.order; ++j) CHECK(cnear(a.coeff[j], b.coeff[j]));
    }
}
