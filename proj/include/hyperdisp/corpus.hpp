#ifndef HYPERDISP_CORPUS_HPP
#define HYPERDISP_CORPUS_HPP

#include <string>
#include <vector>

#include "hyperdisp/symbol.hpp"

namespace hyperdisp {

/// Lifts a polynomial in (tau, xi_1..xi_n) -- variable 0 is tau -- into a
/// SymbolSpec, separating the joint-degree-m principal part from lower terms.
SymbolSpec symbol_from_tau_xi_poly(const MonomialPoly& P, int m, int n, const std::string& name);

struct CorpusEntry {
    SymbolSpec symbol;
    std::string provenance;  // where the operator comes from, human-readable
};

std::vector<std::string> corpus_names();
bool corpus_has(const std::string& name);
CorpusEntry corpus_get(const std::string& name);

// Symbol config files (JSON): {"dimension":n,"order":m,
//   "principal":[{"degree":j,"terms":[{"alpha":[..],"re":x,"im":y}]}],
//   "lower":[{"alpha":[..],"r":k,"re":x,"im":y}]}
std::string symbol_to_json(const SymbolSpec& S);
SymbolSpec symbol_from_json(const std::string& text, const std::string& name = "inline");

}  // namespace hyperdisp

#endif
