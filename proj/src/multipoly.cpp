#include "hyperdisp/multipoly.hpp"

#include <cmath>
#include <stdexcept>

namespace hyperdisp {

void MonomialPoly::add_term(const MultiIndex& alpha, Complex c) {
    if (static_cast<int>(alpha.size()) != dim_)
        throw std::invalid_argument("MonomialPoly: multi-index length != dimension");
    for (int v : alpha)
        if (v < 0) throw std::invalid_argument("MonomialPoly: negative exponent");
    if (std::abs(c.real()) < 1e-300 && std::abs(c.imag()) < 1e-300) {
        // still fold into an existing term: a+(-a) must cancel
        auto it = terms_.find(alpha);
        if (it == terms_.end()) return;
    }
    auto [it, fresh] = terms_.try_emplace(alpha, 0.0);
    it->second += c;
    if (std::abs(it->second.real()) < 1e-300 && std::abs(it->second.imag()) < 1e-300)
        terms_.erase(it);
}

MonomialPoly& MonomialPoly::operator+=(const MonomialPoly& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("MonomialPoly: dimension mismatch");
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
}

MonomialPoly MonomialPoly::operator*(const MonomialPoly& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("MonomialPoly: dimension mismatch");
    MonomialPoly out(dim_);
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : o.terms_) {
            MultiIndex s(dim_);
            for (int i = 0; i < dim_; ++i) s[i] = a[i] + b[i];
            out.add_term(s, ca * cb);
        }
    return out;
}

MonomialPoly MonomialPoly::operator*(Complex c) const {
    MonomialPoly out(dim_);
    for (const auto& [a, ca] : terms_) out.add_term(a, ca * c);
    return out;
}

Complex MonomialPoly::evaluate(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("MonomialPoly: point dimension mismatch");
    Complex acc = 0.0;
    for (const auto& [a, c] : terms_) {
        double mono = 1.0;
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < a[i]; ++k) mono *= x[i];
        acc += c * mono;
    }
    return acc;
}

Complex MonomialPoly::evaluate_complex(const std::vector<Complex>& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("MonomialPoly: point dimension mismatch");
    Complex acc = 0.0;
    for (const auto& [a, c] : terms_) {
        Complex mono = 1.0;
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < a[i]; ++k) mono *= x[i];
        acc += c * mono;
    }
    return acc;
}

MonomialPoly MonomialPoly::derivative(int i) const {
    MonomialPoly out(dim_);
    for (const auto& [a, c] : terms_) {
        if (a[i] == 0) continue;
        MultiIndex b = a;
        b[i] -= 1;
        out.add_term(b, c * static_cast<double>(a[i]));
    }
    return out;
}

bool MonomialPoly::is_homogeneous(int d) const {
    for (const auto& [a, c] : terms_)
        if (abs_index(a) != d) return false;
    return true;
}

int MonomialPoly::total_degree() const {
    int d = -1;
    for (const auto& [a, c] : terms_) d = std::max(d, abs_index(a));
    return d;
}

MonomialPoly MonomialPoly::constant(int dim, Complex c) {
    MonomialPoly p(dim);
    p.add_term(MultiIndex(dim, 0), c);
    return p;
}

MonomialPoly MonomialPoly::variable(int dim, int i, Complex scale) {
    MonomialPoly p(dim);
    MultiIndex a(dim, 0);
    a[i] = 1;
    p.add_term(a, scale);
    return p;
}

}  // namespace hyperdisp
