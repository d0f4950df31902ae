#ifndef HYPERDISP_SYMBOL_HPP
#define HYPERDISP_SYMBOL_HPP

#include <optional>
#include <string>
#include <vector>

#include "hyperdisp/multipoly.hpp"

namespace hyperdisp {

/// Monic polynomial in tau, coefficients stored leading-first:
/// coeff[j] multiplies tau^(m-j), coeff[0] == 1.
struct TauPolynomial {
    std::vector<Complex> coeff;

    int degree() const { return static_cast<int>(coeff.size()) - 1; }
    Complex eval(Complex tau) const;
    Complex eval_derivative(Complex tau) const;
    TauPolynomial derivative() const;
    /// max(1, max_j |c_j|^{1/j}) -- the coefficient scale M of the 2M root bound
    double coefficient_scale() const;
    double coefficient_abs_sum() const;
};

struct LowerTerm {
    MultiIndex alpha;
    int r = 0;
    Complex c;
};

/// Full symbol L(tau,xi) = tau^m + sum_j P_j(xi) tau^(m-j) + sum c_{alpha,r} xi^alpha tau^r,
/// monic in tau (leading coefficient implicit). principal[j-1] holds P_j,
/// homogeneous of degree exactly j; lower terms satisfy |alpha|+r <= m-1.
struct SymbolSpec {
    std::string name;
    int order = 0;  // m
    int dim = 0;    // n
    std::vector<MonomialPoly> principal;
    std::vector<LowerTerm> lower;

    void validate() const;

    /// All partials of L at a point needed by implicit root jets.
    struct Partials {
        Complex L;
        Complex L_tau, L_tautau;
        std::vector<Complex> L_xi;                 // n
        std::vector<Complex> L_xitau;              // n
        std::vector<std::vector<Complex>> L_xixi;  // n x n
    };
    Partials partials_at(Complex tau, const std::vector<double>& xi) const;
};

// --- symbol-module operations ---

TauPolynomial evaluate_symbol(const SymbolSpec& S, const std::vector<double>& xi);
TauPolynomial principal_polynomial(const SymbolSpec& S, const std::vector<double>& xi);

/// Discriminant via the Sylvester resultant of L(.,xi) and dL/dtau(.,xi),
/// normalized so m=2 with L = tau^2 + b tau + c returns b^2 - 4c.
Complex discriminant_at(const SymbolSpec& S, const std::vector<double>& xi);
Complex discriminant_of(const TauPolynomial& p);

struct StabilityNecessaryVerdict {
    bool pass = false;
    double im_c0m1 = 0.0;     // Im c_{0,m-1}
    bool all_real_note = false;  // coefficient absent/zero: roots must all be real
};
/// Necessary stability condition: Im c_{0,m-1} <= 0.
StabilityNecessaryVerdict necessary_stability_check(const SymbolSpec& S);

/// Matrix entries for first-order systems: degree <= 1 polynomial in xi
/// plus a complex constant.
struct SystemEntry {
    MonomialPoly linear;  // degree <= 1 part, dim = n
    Complex constant{0.0, 0.0};
};
/// SymbolSpec of det(tau I - A(xi)), expanded over the polynomial ring.
SymbolSpec system_dispersion(const std::vector<std::vector<SystemEntry>>& A, int dim);

struct FokkerPlanckSystem {
    int N = 0, n = 0;
    std::vector<MultiIndex> basis;        // graded-lex multi-indices, |alpha| <= N
    std::vector<std::vector<double>> B;   // diagonal |alpha|
    std::vector<std::vector<std::vector<double>>> A;  // A[j], each m x m
    SymbolSpec symbol;                    // det(tau I + sum A_j xi_j - i B)
    std::vector<int> gamma;               // gamma[j], j=1..N: multiplicity of root ji at xi=0
};
FokkerPlanckSystem fokker_planck_symbol(int N, int n);

/// Interlacing tau_1<=sigma_1<=tau_2<=...<=sigma_{m-1}<=tau_m (strict variant
/// uses strict inequalities). Inputs sorted ascending.
bool interlacing_check(const std::vector<double>& roots_p, const std::vector<double>& roots_q,
                       bool strict = false);

struct TripleVerdict {
    bool pass = false;
    bool pair_m_ok = false;      // (L_m, L_{m-1}) interlaces (true when L_{m-1} == 0)
    bool pair_m1_ok = false;     // (L_{m-1}, L_{m-2}) interlaces
    bool stable_ok = false;      // roots of L_m - i L_{m-1} - L_{m-2} have Im >= 0
    double min_im = 0.0;
};
/// Hyperbolic-triple check at a frequency point. The polys live in (tau, xi):
/// variable 0 is tau, variables 1..n are xi.
TripleVerdict hermite_triple_check(const MonomialPoly& Lm, const MonomialPoly& Lm1,
                                   const MonomialPoly& Lm2, const std::vector<double>& xi);

}  // namespace hyperdisp

#endif
