#ifndef HYPERDISP_MULTIPOLY_HPP
#define HYPERDISP_MULTIPOLY_HPP

#include <complex>
#include <map>
#include <vector>

namespace hyperdisp {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;

inline int abs_index(const MultiIndex& a) {
    int s = 0;
    for (int v : a) s += v;
    return s;
}

/// Sparse polynomial in n real variables with complex coefficients,
/// term map keyed by multi-index. No zero coefficients are stored;
/// every key has length n.
class MonomialPoly {
public:
    MonomialPoly() : dim_(0) {}
    explicit MonomialPoly(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    bool empty() const { return terms_.empty(); }
    const std::map<MultiIndex, Complex>& terms() const { return terms_; }

    /// Adds c*x^alpha, pruning exact zeros (threshold 1e-300: true zeros only).
    void add_term(const MultiIndex& alpha, Complex c);

    MonomialPoly& operator+=(const MonomialPoly& o);
    MonomialPoly operator*(const MonomialPoly& o) const;
    MonomialPoly operator*(Complex c) const;

    Complex evaluate(const std::vector<double>& x) const;
    Complex evaluate_complex(const std::vector<Complex>& x) const;

    /// d/dx_i
    MonomialPoly derivative(int i) const;

    /// Total degree of every stored term equals d (true for the empty poly).
    bool is_homogeneous(int d) const;
    int total_degree() const;  // -1 for the zero polynomial

    static MonomialPoly constant(int dim, Complex c);
    static MonomialPoly variable(int dim, int i, Complex scale = 1.0);

private:
    int dim_;
    std::map<MultiIndex, Complex> terms_;
};

}  // namespace hyperdisp

#endif
