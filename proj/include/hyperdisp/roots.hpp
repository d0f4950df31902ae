#ifndef HYPERDISP_ROOTS_HPP
#define HYPERDISP_ROOTS_HPP

#include <optional>
#include <vector>

#include "hyperdisp/grid.hpp"
#include "hyperdisp/symbol.hpp"

namespace hyperdisp {

struct SolveReport {
    bool converged = true;
    int iterations = 0;
    double max_residual = 0.0;  // max |p(z)| / residual scale over roots
};

/// Simultaneous-iteration (Aberth) root solve of a monic polynomial with
/// Newton polishing. Warm starts preserve label order; cold starts return
/// roots sorted by (Re, Im). Residual-certified: |p(z)| <= tol * scale(z).
std::vector<Complex> solve_roots(const TauPolynomial& p,
                                 const std::vector<Complex>* warm = nullptr,
                                 SolveReport* report = nullptr);

/// Roots of an arbitrary polynomial, coefficients leading-first.
std::vector<Complex> poly_roots(std::vector<Complex> coeff);

/// Roots of L(.,xi) tracked continuously over a grid under one labeling.
struct RootField {
    FrequencyGrid grid;
    int m = 0;
    std::vector<Complex> roots;        // node-major, stride m
    std::vector<double> disc_mag;      // |discriminant| per node
    std::vector<double> residual;      // certified residual per node
    std::vector<uint8_t> mult_flag;    // 1 where discriminant under threshold
    double mult_threshold = 0.0;
    double coeff_bound = 0.0;          // max over nodes of coefficient scale

    Complex root(std::int64_t node, int k) const { return roots[node * m + k]; }
    std::int64_t nodes() const { return grid.node_count(); }
};

/// Node-to-node label assignment minimizing total displacement (all m!
/// candidates for m <= 6, greedy with collision repair above). Nodes whose
/// discriminant is below 1e-10 * scale^(2m-2) are multiplicity-flagged and
/// labels freeze through them.
RootField track_field(const SymbolSpec& S, const FrequencyGrid& g);

struct PrincipalPairing {
    std::vector<int> tau_to_phi;  // label k -> principal label
    double sup_deviation = 0.0;   // over the outer 20% of the grid
    bool bounded = true;          // no growth trend outward
    double growth_ratio = 1.0;    // outer-band mean / inner-band mean
};
/// Pairs each tracked root with a principal root phi_k, minimizing the
/// sup over large-|xi| nodes of |tau_k - phi_k|; errors if the deviation
/// grows toward the grid edge (violating the bounded-perturbation property).
PrincipalPairing pair_principal(const RootField& field, const SymbolSpec& S);

struct RootJet {
    Complex value;
    std::vector<Complex> gradient;               // n
    std::vector<std::vector<Complex>> hessian;   // n x n, symmetric
};

/// Implicit derivatives of a simple root: grad tau_i = -L_xi/L_tau and the
/// symmetric Hessian assembled from second partials of L. Throws when
/// |dL/dtau| falls under the scale-free simple-root threshold.
RootJet root_jet(const SymbolSpec& S, const std::vector<double>& xi, Complex seed);

/// |dL/dtau| threshold used by root_jet: 1e-8 * sum_j (m-j)|c_j| rho^(m-j-1).
double simple_root_scale(const TauPolynomial& p, double rho);

/// CSV export: node index, xi components, label k, Re tau, Im tau, |discriminant|.
std::string field_to_csv(const RootField& field);

}  // namespace hyperdisp

#endif
