#include "hyperdisp/corpus.hpp"

#include <json.hpp>
#include <stdexcept>

namespace hyperdisp {

SymbolSpec symbol_from_tau_xi_poly(const MonomialPoly& P, int m, int n, const std::string& name) {
    SymbolSpec S;
    S.name = name;
    S.order = m;
    S.dim = n;
    S.principal.assign(m, MonomialPoly(n));
    bool monic = false;
    for (const auto& [a, c] : P.terms()) {
        int r = a[0];
        MultiIndex alpha(a.begin() + 1, a.end());
        int total = r + abs_index(alpha);
        if (r == m) {
            if (std::abs(c - Complex(1.0)) > 1e-9)
                throw std::invalid_argument(name + ": polynomial not monic in tau");
            monic = true;
        } else if (total == m) {
            S.principal[m - r - 1].add_term(alpha, c);
        } else if (total < m) {
            S.lower.push_back({alpha, r, c});
        } else {
            throw std::invalid_argument(name + ": term of joint degree > m");
        }
    }
    if (!monic) throw std::invalid_argument(name + ": tau^m term missing");
    S.validate();
    return S;
}

namespace {

MonomialPoly xi_norm_sq(int n) {
    MonomialPoly p(n);
    for (int i = 0; i < n; ++i) {
        MultiIndex a(n, 0);
        a[i] = 2;
        p.add_term(a, 1.0);
    }
    return p;
}

MonomialPoly poly_pow(const MonomialPoly& p, int k) {
    MonomialPoly acc = MonomialPoly::constant(p.dim(), 1.0);
    for (int i = 0; i < k; ++i) acc = acc * p;
    return acc;
}

/// term c * tau^r * G(xi) lifted into (tau,xi) variables
void add_tau_term(MonomialPoly& out, Complex c, int r, const MonomialPoly& G) {
    int n = G.dim();
    for (const auto& [a, g] : G.terms()) {
        MultiIndex t(n + 1, 0);
        t[0] = r;
        for (int i = 0; i < n; ++i) t[i + 1] = a[i];
        out.add_term(t, c * g);
    }
}

SymbolSpec second_order(const std::string& name, int n, double c2, Complex c01, Complex c00) {
    // d_t^2 u - c^2 Lap u + delta d_t u + mu u = 0  <->  tau^2 - c^2|xi|^2 - i delta tau - mu
    SymbolSpec S;
    S.name = name;
    S.order = 2;
    S.dim = n;
    S.principal.assign(2, MonomialPoly(n));
    S.principal[1] = xi_norm_sq(n) * Complex(-c2);
    if (c01 != Complex(0.0)) S.lower.push_back({MultiIndex(n, 0), 1, c01});
    if (c00 != Complex(0.0)) S.lower.push_back({MultiIndex(n, 0), 0, c00});
    S.validate();
    return S;
}

/// Linearised 13-moment Grad system dispersion relation in 2D, degree 9.
/// Given in the source as P = Q9 - iQ8 - Q7 + iQ6 + Q5 - iQ4 with
/// Q_j(omega,xi), omega = tau/|xi|, alpha = xi1^2/|xi|^2, beta = xi2^2/|xi|^2;
/// rehomogenized here via alpha*beta*|xi|^4 = xi1^2 xi2^2. Transcribed
/// coefficients; flagged for independent re-derivation from the moment system.
SymbolSpec grad13_symbol() {
    const int n = 2;
    MonomialPoly r2 = xi_norm_sq(n);
    MonomialPoly r4 = poly_pow(r2, 2);
    MonomialPoly r6 = poly_pow(r2, 3);
    MonomialPoly cross(n);  // xi1^2 xi2^2
    cross.add_term({2, 2}, 1.0);
    MonomialPoly crossr2 = cross * r2;
    MonomialPoly one = MonomialPoly::constant(n, 1.0);

    auto combo = [&](const MonomialPoly& base, double cross_frac, const MonomialPoly& cr) {
        MonomialPoly p = base;
        p += cr * Complex(-cross_frac);
        return p;
    };

    MonomialPoly P(n + 1);
    // Q9: |xi|^9 w^3 [w^6 - 103/25 w^4 + 21/5 w^2 (1 - 912/2625 ab) - 27/25 (1 - 432/675 ab)]
    add_tau_term(P, 1.0, 9, one);
    add_tau_term(P, -103.0 / 25.0, 7, r2);
    add_tau_term(P, 21.0 / 5.0, 5, combo(r4, 912.0 / 2625.0, cross));
    add_tau_term(P, -27.0 / 25.0, 3, combo(r6, 432.0 / 675.0, crossr2));
    // -i Q8: |xi|^8 w^2 [13/3 w^6 - 1094/75 w^4 + 1381/125 w^2 (1 - 2032/6905 ab)
    //                    - 264/125 (1 - 143/330 ab)]
    const Complex mi(0.0, -1.0);
    add_tau_term(P, mi * (13.0 / 3.0), 8, one);
    add_tau_term(P, mi * (-1094.0 / 75.0), 6, r2);
    add_tau_term(P, mi * (1381.0 / 125.0), 4, combo(r4, 2032.0 / 6905.0, cross));
    add_tau_term(P, mi * (-264.0 / 125.0), 2, combo(r6, 143.0 / 330.0, crossr2));
    // -Q7: |xi|^7 w [67/9 w^6 - 497/25 w^4 + 3943/375 w^2 (1 - 832/3943 ab)
    //                - 159/125 (1 - 48/159 ab)]
    add_tau_term(P, -67.0 / 9.0, 7, one);
    add_tau_term(P, 497.0 / 25.0, 5, r2);
    add_tau_term(P, -3943.0 / 375.0, 3, combo(r4, 832.0 / 3943.0, cross));
    add_tau_term(P, 159.0 / 125.0, 1, combo(r6, 48.0 / 159.0, crossr2));
    // +i Q6: |xi|^6 [19/3 w^6 - 2908/225 w^4 + 13/3 w^2 (1 - 32/325 ab) - 6/25]
    const Complex pi_(0.0, 1.0);
    add_tau_term(P, pi_ * (19.0 / 3.0), 6, one);
    add_tau_term(P, pi_ * (-2908.0 / 225.0), 4, r2);
    add_tau_term(P, pi_ * (13.0 / 3.0), 2, combo(r4, 32.0 / 325.0, cross));
    add_tau_term(P, pi_ * (-6.0 / 25.0), 0, r6);
    // +Q5: |xi|^5 w [8/3 w^4 - 178/45 w^2 + 2/3]
    add_tau_term(P, 8.0 / 3.0, 5, one);
    add_tau_term(P, -178.0 / 45.0, 3, r2);
    add_tau_term(P, 2.0 / 3.0, 1, r4);
    // -i Q4: 4/9 |xi|^4 w^2 (w^2 - 1)
    add_tau_term(P, mi * (4.0 / 9.0), 4, one);
    add_tau_term(P, mi * (-4.0 / 9.0), 2, r2);

    // only Q9 reaches tau^9 and its w^9 coefficient is 1, so P is monic
    return symbol_from_tau_xi_poly(P, 9, n, "grad13_2d");
}

SymbolSpec quartic_symbol() {
    // tau^4 - (xi1^4 + xi2^4): convexity fixture; its positive real root has
    // the l^4-ball level sets with fourth-order flat points on the axes.
    SymbolSpec S;
    S.name = "quartic_2d";
    S.order = 4;
    S.dim = 2;
    S.principal.assign(4, MonomialPoly(2));
    MonomialPoly p4(2);
    p4.add_term({4, 0}, -1.0);
    p4.add_term({0, 4}, -1.0);
    S.principal[3] = p4;
    S.validate();
    return S;
}

}  // namespace

std::vector<std::string> corpus_names() {
    return {"wave_1d",  "wave_2d",      "wave_3d", "kg_1d",     "dissipative_wave_1d",
            "negative_mass_wave_1d", "fp_1_1",  "fp_2_1", "quartic_2d", "grad13_2d"};
}

bool corpus_has(const std::string& name) {
    for (const auto& n : corpus_names())
        if (n == name) return true;
    return false;
}

CorpusEntry corpus_get(const std::string& name) {
    if (name == "wave_1d")
        return {second_order(name, 1, 1.0, 0.0, 0.0), "wave equation d_t^2 - Lap, n=1"};
    if (name == "wave_2d")
        return {second_order(name, 2, 1.0, 0.0, 0.0), "wave equation d_t^2 - Lap, n=2"};
    if (name == "wave_3d")
        return {second_order(name, 3, 1.0, 0.0, 0.0), "wave equation d_t^2 - Lap, n=3"};
    if (name == "kg_1d")
        return {second_order(name, 1, 1.0, 0.0, Complex(-1.0)),
                "Klein-Gordon d_t^2 - Lap + 1 (mass mu=1), n=1"};
    if (name == "dissipative_wave_1d")
        return {second_order(name, 1, 1.0, Complex(0.0, -1.0), 0.0),
                "dissipative wave d_t^2 - Lap + d_t, n=1"};
    if (name == "negative_mass_wave_1d")
        return {second_order(name, 1, 1.0, Complex(0.0, -1.0), Complex(1.0)),
                "wave with dissipation delta=1 and negative mass mu=-1, n=1; "
                "stable only outside |xi|<=1, use with a spectral exclusion ball"};
    if (name == "fp_1_1")
        return {fokker_planck_symbol(1, 1).symbol,
                "Fokker-Planck Hermite-Galerkin dispersion polynomial, N=1, n=1"};
    if (name == "fp_2_1")
        return {fokker_planck_symbol(2, 1).symbol,
                "Fokker-Planck Hermite-Galerkin dispersion polynomial, N=2, n=1"};
    if (name == "quartic_2d")
        return {quartic_symbol(),
                "anisotropic quartic tau^4 - xi1^4 - xi2^4; convexity fixture with gamma=4"};
    if (name == "grad13_2d")
        return {grad13_symbol(),
                "linearised 13-moment Grad system dispersion relation, 2D, degree 9 "
                "(transcribed coefficients)"};
    throw std::invalid_argument("corpus: unknown symbol '" + name + "'");
}

std::string symbol_to_json(const SymbolSpec& S) {
    nlohmann::json j;
    j["dimension"] = S.dim;
    j["order"] = S.order;
    j["principal"] = nlohmann::json::array();
    for (int d = 1; d <= S.order; ++d) {
        nlohmann::json block;
        block["degree"] = d;
        block["terms"] = nlohmann::json::array();
        for (const auto& [a, c] : S.principal[d - 1].terms())
            block["terms"].push_back({{"alpha", a}, {"re", c.real()}, {"im", c.imag()}});
        j["principal"].push_back(block);
    }
    j["lower"] = nlohmann::json::array();
    for (const auto& t : S.lower)
        j["lower"].push_back({{"alpha", t.alpha}, {"r", t.r}, {"re", t.c.real()}, {"im", t.c.imag()}});
    return j.dump(2);
}

SymbolSpec symbol_from_json(const std::string& text, const std::string& name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument("symbol config: parse error: " + std::string(e.what()));
    }
    SymbolSpec S;
    S.name = name;
    try {
        S.dim = j.at("dimension").get<int>();
        S.order = j.at("order").get<int>();
        S.principal.assign(S.order, MonomialPoly(S.dim));
        for (const auto& block : j.at("principal")) {
            int d = block.at("degree").get<int>();
            if (d < 1 || d > S.order)
                throw std::invalid_argument("principal degree out of range");
            for (const auto& t : block.at("terms")) {
                MultiIndex a = t.at("alpha").get<MultiIndex>();
                S.principal[d - 1].add_term(
                    a, Complex(t.at("re").get<double>(), t.value("im", 0.0)));
            }
        }
        if (j.contains("lower"))
            for (const auto& t : j.at("lower")) {
                LowerTerm lt;
                lt.alpha = t.at("alpha").get<MultiIndex>();
                lt.r = t.at("r").get<int>();
                lt.c = Complex(t.at("re").get<double>(), t.value("im", 0.0));
                S.lower.push_back(lt);
            }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("symbol config: " + std::string(e.what()));
    }
    S.validate();
    return S;
}

}  // namespace hyperdisp
