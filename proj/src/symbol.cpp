#include "hyperdisp/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "hyperdisp/roots.hpp"

namespace hyperdisp {

Complex TauPolynomial::eval(Complex tau) const {
    Complex acc = 0.0;
    for (Complex c : coeff) acc = acc * tau + c;
    return acc;
}

Complex TauPolynomial::eval_derivative(Complex tau) const {
    const int m = degree();
    Complex acc = 0.0;
    for (int j = 0; j < m; ++j) acc = acc * tau + coeff[j] * static_cast<double>(m - j);
    return acc;
}

TauPolynomial TauPolynomial::derivative() const {
    const int m = degree();
    TauPolynomial d;
    d.coeff.resize(m);
    for (int j = 0; j < m; ++j) d.coeff[j] = coeff[j] * static_cast<double>(m - j);
    return d;
}

double TauPolynomial::coefficient_scale() const {
    double M = 1.0;
    const int m = degree();
    for (int j = 1; j <= m; ++j)
        M = std::max(M, std::pow(std::abs(coeff[j]), 1.0 / j));
    return M;
}

double TauPolynomial::coefficient_abs_sum() const {
    double s = 0.0;
    for (Complex c : coeff) s += std::abs(c);
    return s;
}

void SymbolSpec::validate() const {
    if (order < 1) throw std::invalid_argument(name + ": order must be >= 1");
    if (dim < 1) throw std::invalid_argument(name + ": dimension must be >= 1");
    if (static_cast<int>(principal.size()) != order)
        throw std::invalid_argument(name + ": expected " + std::to_string(order) +
                                    " principal polynomials");
    for (int j = 1; j <= order; ++j) {
        if (principal[j - 1].dim() != dim)
            throw std::invalid_argument(name + ": P_" + std::to_string(j) + " dimension mismatch");
        if (!principal[j - 1].is_homogeneous(j))
            throw std::invalid_argument(name + ": P_" + std::to_string(j) +
                                        " is not homogeneous of degree " + std::to_string(j));
    }
    for (const auto& t : lower) {
        if (static_cast<int>(t.alpha.size()) != dim)
            throw std::invalid_argument(name + ": lower-term multi-index length mismatch");
        if (t.r < 0 || abs_index(t.alpha) + t.r > order - 1)
            throw std::invalid_argument(name + ": lower term violates |alpha|+r <= m-1");
    }
}

TauPolynomial evaluate_symbol(const SymbolSpec& S, const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) != S.dim)
        throw std::invalid_argument(S.name + ": frequency dimension mismatch");
    for (double v : xi)
        if (!std::isfinite(v)) throw std::invalid_argument(S.name + ": non-finite frequency");
    TauPolynomial p;
    p.coeff.assign(S.order + 1, Complex(0.0));
    p.coeff[0] = 1.0;
    for (int j = 1; j <= S.order; ++j) p.coeff[j] = S.principal[j - 1].evaluate(xi);
    for (const auto& t : S.lower) {
        double mono = 1.0;
        for (int i = 0; i < S.dim; ++i)
            for (int k = 0; k < t.alpha[i]; ++k) mono *= xi[i];
        p.coeff[S.order - t.r] += t.c * mono;
    }
    return p;
}

TauPolynomial principal_polynomial(const SymbolSpec& S, const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) != S.dim)
        throw std::invalid_argument(S.name + ": frequency dimension mismatch");
    TauPolynomial p;
    p.coeff.assign(S.order + 1, Complex(0.0));
    p.coeff[0] = 1.0;
    for (int j = 1; j <= S.order; ++j) p.coeff[j] = S.principal[j - 1].evaluate(xi);
    return p;
}

SymbolSpec::Partials SymbolSpec::partials_at(Complex tau, const std::vector<double>& xi) const {
    const int n = dim;
    Partials out;
    out.L_xi.assign(n, 0.0);
    out.L_xitau.assign(n, 0.0);
    out.L_xixi.assign(n, std::vector<Complex>(n, 0.0));

    // tau powers
    std::vector<Complex> tp(order + 1);
    tp[0] = 1.0;
    for (int k = 1; k <= order; ++k) tp[k] = tp[k - 1] * tau;

    auto accumulate = [&](const MonomialPoly& c_of_xi, int r) {
        // term c(xi) * tau^r
        Complex c = c_of_xi.evaluate(xi);
        out.L += c * tp[r];
        if (r >= 1) out.L_tau += c * static_cast<double>(r) * tp[r - 1];
        if (r >= 2) out.L_tautau += c * static_cast<double>(r * (r - 1)) * tp[r - 2];
        for (int i = 0; i < n; ++i) {
            MonomialPoly di = c_of_xi.derivative(i);
            if (di.empty()) continue;
            Complex ci = di.evaluate(xi);
            out.L_xi[i] += ci * tp[r];
            if (r >= 1) out.L_xitau[i] += ci * static_cast<double>(r) * tp[r - 1];
            for (int j = i; j < n; ++j) {
                MonomialPoly dij = di.derivative(j);
                if (dij.empty()) continue;
                out.L_xixi[i][j] += dij.evaluate(xi) * tp[r];
            }
        }
    };

    // tau^m
    out.L += tp[order];
    out.L_tau += static_cast<double>(order) * tp[order - 1];
    if (order >= 2) out.L_tautau += static_cast<double>(order * (order - 1)) * tp[order - 2];
    for (int j = 1; j <= order; ++j) accumulate(principal[j - 1], order - j);
    for (const auto& t : lower) {
        MonomialPoly mono(dim);
        mono.add_term(t.alpha, t.c);
        accumulate(mono, t.r);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) out.L_xixi[i][j] = out.L_xixi[j][i];
    return out;
}

// --- discriminant ---

namespace {

/// LU determinant with partial pivoting of a dense complex matrix.
Complex dense_det(std::vector<std::vector<Complex>> a) {
    const int n = static_cast<int>(a.size());
    Complex det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a[col][col]);
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > best) { best = std::abs(a[r][col]); piv = r; }
        if (best == 0.0) return 0.0;
        if (piv != col) { std::swap(a[piv], a[col]); det = -det; }
        det *= a[col][col];
        for (int r = col + 1; r < n; ++r) {
            Complex f = a[r][col] / a[col][col];
            if (f == Complex(0.0)) continue;
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

}  // namespace

Complex discriminant_of(const TauPolynomial& p) {
    const int m = p.degree();
    if (m == 1) return 1.0;
    TauPolynomial dp = p.derivative();
    const int size = 2 * m - 1;
    std::vector<std::vector<Complex>> syl(size, std::vector<Complex>(size, 0.0));
    for (int row = 0; row < m - 1; ++row)
        for (int j = 0; j <= m; ++j) syl[row][row + j] = p.coeff[j];
    for (int row = 0; row < m; ++row)
        for (int j = 0; j <= m - 1; ++j) syl[m - 1 + row][row + j] = dp.coeff[j];
    Complex res = dense_det(std::move(syl));
    double sign = ((m * (m - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    return sign * res;  // leading coefficient is 1, no further normalization
}

Complex discriminant_at(const SymbolSpec& S, const std::vector<double>& xi) {
    return discriminant_of(evaluate_symbol(S, xi));
}

StabilityNecessaryVerdict necessary_stability_check(const SymbolSpec& S) {
    Complex c0m1 = 0.0;
    bool present = false;
    for (const auto& t : S.lower)
        if (t.r == S.order - 1 && abs_index(t.alpha) == 0) { c0m1 += t.c; present = true; }
    StabilityNecessaryVerdict v;
    v.im_c0m1 = c0m1.imag();
    v.pass = v.im_c0m1 <= 0.0;
    v.all_real_note = v.pass && (!present || v.im_c0m1 == 0.0);
    return v;
}

// --- determinants over the polynomial ring ---

namespace {

/// Determinant of an m x m matrix of MonomialPoly by Laplace expansion with
/// memoization over column subsets (row = popcount of the mask).
MonomialPoly poly_det(const std::vector<std::vector<MonomialPoly>>& M, int vars) {
    const int m = static_cast<int>(M.size());
    if (m > 16) throw std::invalid_argument("poly_det: matrix too large");
    std::vector<MonomialPoly> memo(static_cast<size_t>(1) << m);
    std::vector<bool> have(static_cast<size_t>(1) << m, false);
    memo[0] = MonomialPoly::constant(vars, 1.0);
    have[0] = true;
    // iterate masks in increasing popcount order implicitly: plain increasing
    // order works because mask \ {c} < mask
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        int row = __builtin_popcount(mask) - 1;
        MonomialPoly acc(vars);
        int pos = 0;
        for (int c = 0; c < m; ++c) {
            if (!(mask & (1u << c))) continue;
            unsigned sub = mask & ~(1u << c);
            if (!M[row][c].empty()) {
                MonomialPoly contrib = M[row][c] * memo[sub];
                if (pos % 2 == 1) contrib = contrib * Complex(-1.0);
                acc += contrib;
            }
            ++pos;
        }
        memo[mask] = std::move(acc);
        have[mask] = true;
    }
    return memo[(1u << m) - 1];
}

/// Splits det(tau I - A) -- a polynomial in (tau, xi_1..xi_n), tau = var 0 --
/// into a SymbolSpec: joint-degree-m terms feed P_j, the rest are lower terms.
SymbolSpec split_into_symbol(const MonomialPoly& det, int m, int n, const std::string& name) {
    SymbolSpec S;
    S.name = name;
    S.order = m;
    S.dim = n;
    S.principal.assign(m, MonomialPoly(n));
    bool monic_seen = false;
    for (const auto& [a, c] : det.terms()) {
        int r = a[0];
        MultiIndex alpha(a.begin() + 1, a.end());
        int total = r + abs_index(alpha);
        if (r == m) {
            if (std::abs(c - Complex(1.0)) > 1e-9)
                throw std::runtime_error(name + ": dispersion polynomial not monic in tau");
            monic_seen = true;
            continue;
        }
        if (total > m) throw std::runtime_error(name + ": dispersion degree overflow");
        if (total == m) {
            S.principal[m - r - 1].add_term(alpha, c);
        } else {
            S.lower.push_back({alpha, r, c});
        }
    }
    if (!monic_seen) throw std::runtime_error(name + ": tau^m coefficient missing");
    S.validate();
    return S;
}

}  // namespace

SymbolSpec system_dispersion(const std::vector<std::vector<SystemEntry>>& A, int dim) {
    const int m = static_cast<int>(A.size());
    if (m == 0) throw std::invalid_argument("system_dispersion: empty matrix");
    for (const auto& row : A)
        if (static_cast<int>(row.size()) != m)
            throw std::invalid_argument("system_dispersion: matrix not square");
    const int vars = dim + 1;  // tau, xi_1..xi_n
    std::vector<std::vector<MonomialPoly>> M(m, std::vector<MonomialPoly>(m, MonomialPoly(vars)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            MonomialPoly e(vars);
            if (i == j) {
                MultiIndex t(vars, 0);
                t[0] = 1;
                e.add_term(t, 1.0);
            }
            // -A_ij: linear part lifted to (tau,xi) variables, plus constant
            if (A[i][j].linear.total_degree() > 1)
                throw std::invalid_argument("system_dispersion: entry degree > 1 in xi");
            for (const auto& [a, c] : A[i][j].linear.terms()) {
                MultiIndex t(vars, 0);
                for (int k = 0; k < dim; ++k) t[k + 1] = a[k];
                e.add_term(t, -c);
            }
            e.add_term(MultiIndex(vars, 0), -A[i][j].constant);
            M[i][j] = std::move(e);
        }
    MonomialPoly det = poly_det(M, vars);
    return split_into_symbol(det, m, dim, "system_dispersion");
}

FokkerPlanckSystem fokker_planck_symbol(int N, int n) {
    if (N < 1) throw std::invalid_argument("fokker_planck_symbol: N must be >= 1");
    if (n < 1 || n > 3) throw std::invalid_argument("fokker_planck_symbol: n in {1,2,3}");

    // graded-lex basis of multi-indices with |alpha| <= N
    std::vector<MultiIndex> basis;
    std::vector<MultiIndex> cur{MultiIndex(n, 0)};
    for (int deg = 0; deg <= N; ++deg) {
        std::vector<MultiIndex> level;
        std::function<void(MultiIndex&, int, int)> gen = [&](MultiIndex& a, int pos, int left) {
            if (pos == n - 1) {
                a[pos] = left;
                level.push_back(a);
                return;
            }
            for (int v = left; v >= 0; --v) {
                a[pos] = v;
                gen(a, pos + 1, left - v);
            }
        };
        MultiIndex a(n, 0);
        gen(a, 0, deg);
        std::sort(level.begin(), level.end());
        basis.insert(basis.end(), level.begin(), level.end());
    }
    const int m = static_cast<int>(basis.size());
    if (m > 16)
        throw std::invalid_argument("fokker_planck_symbol: level N too large for n");

    std::map<MultiIndex, int> index;
    for (int i = 0; i < m; ++i) index[basis[i]] = i;

    FokkerPlanckSystem sys;
    sys.N = N;
    sys.n = n;
    sys.basis = basis;
    sys.B.assign(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i) sys.B[i][i] = abs_index(basis[i]);
    sys.A.assign(n, std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0)));
    for (int j = 0; j < n; ++j) {
        for (int col = 0; col < m; ++col) {
            const MultiIndex& a = basis[col];
            if (a[j] > 0) {  // a_j^{alpha - e_j, alpha} = alpha_j
                MultiIndex t = a;
                t[j] -= 1;
                sys.A[j][index[t]][col] = a[j];
            }
            MultiIndex u = a;  // a_j^{alpha + e_j, alpha} = 1
            u[j] += 1;
            auto it = index.find(u);
            if (it != index.end()) sys.A[j][it->second][col] = 1.0;
        }
    }

    // det(tau I + sum_j A_j xi_j - i B) == det(tau I - (-sum A_j xi_j + iB))
    std::vector<std::vector<SystemEntry>> M(m, std::vector<SystemEntry>(m));
    for (int i = 0; i < m; ++i)
        for (int c = 0; c < m; ++c) {
            SystemEntry e;
            e.linear = MonomialPoly(n);
            for (int j = 0; j < n; ++j)
                if (sys.A[j][i][c] != 0.0) {
                    MultiIndex t(n, 0);
                    t[j] = 1;
                    e.linear.add_term(t, -sys.A[j][i][c]);
                }
            e.constant = (i == c) ? Complex(0.0, sys.B[i][i]) : Complex(0.0);
            M[i][c] = std::move(e);
        }
    sys.symbol = system_dispersion(M, n);
    sys.symbol.name = "fokker_planck_" + std::to_string(N) + "_" + std::to_string(n);

    sys.gamma.assign(N + 1, 0);
    for (int i = 0; i < m; ++i) sys.gamma[abs_index(basis[i])] += 1;
    sys.gamma.erase(sys.gamma.begin());  // gamma[0] slot: single root at origin, not reported
    return sys;
}

bool interlacing_check(const std::vector<double>& p, const std::vector<double>& q, bool strict) {
    if (q.size() + 1 != p.size())
        throw std::invalid_argument("interlacing_check: need |q| = |p| - 1");
    auto sorted = [](const std::vector<double>& v) {
        return std::is_sorted(v.begin(), v.end());
    };
    if (!sorted(p) || !sorted(q))
        throw std::invalid_argument("interlacing_check: inputs must be sorted ascending");
    for (size_t i = 0; i < q.size(); ++i) {
        if (strict) {
            if (!(p[i] < q[i] && q[i] < p[i + 1])) return false;
        } else {
            if (!(p[i] <= q[i] && q[i] <= p[i + 1])) return false;
        }
    }
    return true;
}

namespace {

/// Restriction of a (tau,xi)-polynomial to fixed xi: coefficients of tau^k,
/// leading-first.
std::vector<Complex> tau_restriction(const MonomialPoly& P, const std::vector<double>& xi) {
    int dtau = 0;
    for (const auto& [a, c] : P.terms()) dtau = std::max(dtau, a[0]);
    std::vector<Complex> coef(dtau + 1, 0.0);
    for (const auto& [a, c] : P.terms()) {
        double mono = 1.0;
        for (size_t i = 1; i < a.size(); ++i)
            for (int k = 0; k < a[i]; ++k) mono *= xi[i - 1];
        coef[dtau - a[0]] += c * mono;
    }
    return coef;
}

bool real_sorted_roots(const std::vector<Complex>& roots, std::vector<double>& out) {
    out.clear();
    for (Complex r : roots) {
        if (std::abs(r.imag()) > 1e-7 * (1.0 + std::abs(r))) return false;
        out.push_back(r.real());
    }
    std::sort(out.begin(), out.end());
    return true;
}

}  // namespace

TripleVerdict hermite_triple_check(const MonomialPoly& Lm, const MonomialPoly& Lm1,
                                   const MonomialPoly& Lm2, const std::vector<double>& xi) {
    const int m = Lm.total_degree();
    if (!Lm.is_homogeneous(m)) throw std::invalid_argument("hermite_triple_check: Lm not homogeneous");
    if (!Lm1.empty() && !Lm1.is_homogeneous(m - 1))
        throw std::invalid_argument("hermite_triple_check: Lm1 degree mismatch");
    if (!Lm2.empty() && !Lm2.is_homogeneous(m - 2))
        throw std::invalid_argument("hermite_triple_check: Lm2 degree mismatch");

    TripleVerdict v;
    auto cm = tau_restriction(Lm, xi);
    auto cm1 = Lm1.empty() ? std::vector<Complex>{} : tau_restriction(Lm1, xi);
    auto cm2 = Lm2.empty() ? std::vector<Complex>{} : tau_restriction(Lm2, xi);

    std::vector<double> rm, rm1, rm2;
    bool rm_ok = real_sorted_roots(poly_roots(cm), rm);

    bool lm1_zero = cm1.empty() || std::all_of(cm1.begin(), cm1.end(), [](Complex c) {
                        return std::abs(c) < 1e-14;
                    });
    if (lm1_zero) {
        v.pair_m_ok = true;  // degenerate middle polynomial: pair checks skipped
        v.pair_m1_ok = true;
    } else {
        bool rm1_ok = real_sorted_roots(poly_roots(cm1), rm1);
        v.pair_m_ok = rm_ok && rm1_ok && rm1.size() + 1 == rm.size() &&
                      interlacing_check(rm, rm1);
        bool lm2_zero = cm2.empty() || std::all_of(cm2.begin(), cm2.end(), [](Complex c) {
                            return std::abs(c) < 1e-14;
                        });
        if (lm2_zero) {
            v.pair_m1_ok = true;
        } else {
            bool rm2_ok = real_sorted_roots(poly_roots(cm2), rm2);
            v.pair_m1_ok = rm1_ok && rm2_ok && rm2.size() + 1 == rm1.size() &&
                           interlacing_check(rm1, rm2);
        }
    }

    // tau-form of the three-term operator: Lm - i Lm1 - Lm2
    std::vector<Complex> full = cm;
    auto add_scaled = [&](const std::vector<Complex>& c, Complex s) {
        if (c.empty()) return;
        size_t off = full.size() - c.size();
        for (size_t i = 0; i < c.size(); ++i) full[off + i] += s * c[i];
    };
    add_scaled(cm1, Complex(0.0, -1.0));
    add_scaled(cm2, Complex(-1.0, 0.0));
    auto roots = poly_roots(full);
    v.min_im = 1e300;
    for (Complex r : roots) v.min_im = std::min(v.min_im, r.imag());
    v.stable_ok = v.min_im >= -1e-9;
    v.pass = v.pair_m_ok && v.pair_m1_ok && v.stable_ok;
    return v;
}

}  // namespace hyperdisp
