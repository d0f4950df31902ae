#ifndef HYPERDISP_PROPAGATE_HPP
#define HYPERDISP_PROPAGATE_HPP

#include <map>
#include <string>
#include <vector>

#include "hyperdisp/grid.hpp"
#include "hyperdisp/symbol.hpp"

namespace hyperdisp {

/// Small dense complex matrix, row-major.
struct CMat {
    int n = 0;
    std::vector<Complex> a;
    CMat() = default;
    explicit CMat(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}
    Complex& at(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
    Complex at(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }
    static CMat identity(int n);
    CMat operator*(const CMat& o) const;
    double norm1() const;
};

/// Companion matrix of the monic tau-polynomial: spectrum = {tau_k(xi)},
/// state vector (u^, D_t u^, ..., D_t^{m-1} u^).
CMat companion(const SymbolSpec& S, const std::vector<double>& xi);

/// Matrix exponential by scaling-and-squaring with the order-13 Pade core.
CMat expm(const CMat& A);

/// Phi(t, xi) = physical propagator: Phi(0) = I, d_t^l Phi_{0,j}(0) = delta_lj,
/// row l is the l-th time derivative of row 0, column j is E_j(t, xi).
/// Robust at multiplicities (no Vandermonde singularity).
CMat propagator(const SymbolSpec& S, const std::vector<double>& xi, double t);

/// E-row evaluation used by the experiment hot loop: returns row `r` of the
/// physical propagator (the r-th time derivative of (E_0 .. E_{m-1})).
/// Closed form for m = 2, Pade expm otherwise.
std::vector<Complex> propagator_row(const TauPolynomial& p, double t, int r);

/// Amplitudes A_j^k of E_j = sum_k A_j^k e^{i tau_k t} for distinct roots,
/// normalized so that sum_k A_j^k tau_k^l = delta_lj. The physical propagator
/// column satisfies Phi_{0,j} = i^{-j} sum_k A_j^k e^{i tau_k t}.
std::vector<Complex> vandermonde_amplitudes(const std::vector<Complex>& roots, int j,
                                            double gap_threshold = 0.0);

struct CauchyData {
    enum class Kind { Unit, Gaussian, IndicatorBand, RingBand };
    Kind kind = Kind::Unit;
    double sigma = 1.0;         // gaussian width
    double r0 = 1.0, width = 0.5;  // band presets
    int component = -1;         // which E_j the data drives (-1: j = m-1)
    double exclude_ball = 0.0;  // zero out |xi| <= radius (kept strict)

    double value(const std::vector<double>& xi) const;  // frequency-side profile
};

struct SynthesisResult {
    std::vector<Complex> values;  // dual-grid samples, FFT index order
    double sup_norm = 0.0;
    double l2_norm = 0.0;         // discrete Parseval (frequency side)
    double l2_space = 0.0;        // space-side check value
    double dx = 0.0;
};

/// Inverse discrete Fourier synthesis of E_j(t)*window*data with the
/// convention u^(xi) = int e^{-ix.xi} u dx; Riemann normalization
/// (2pi)^{-n} * cell volume. Errors when frequency energy within two cells of
/// the grid edge exceeds 1e-6 of the total (aliasing check).
SynthesisResult synthesize(const SymbolSpec& S, int j, double t, const FrequencyGrid& grid,
                           const CauchyData& data, double window_fraction = 0.8,
                           int r = 0, const MultiIndex* alpha = nullptr);

struct TimeLadder {
    double t_min = 1.0, t_max = 400.0;
    int count = 24;
    std::vector<double> times() const;
};

struct RunEntry {
    double t = 0.0;
    std::string q;  // "2" or "inf"
    int r = 0;
    int alpha_abs = 0;
    double norm = 0.0;
};

struct PropagatorRun {
    std::string symbol;
    FrequencyGrid grid;
    std::vector<double> times;
    int component = 0;
    bool kernel = false;  // unit data
    std::vector<RunEntry> entries;

    std::vector<std::pair<double, double>> series(const std::string& q, int r,
                                                  int alpha_abs) const;
    std::string to_csv() const;
};

struct ExperimentConfig {
    FrequencyGrid grid;
    TimeLadder ladder;
    CauchyData data;
    std::vector<std::pair<int, MultiIndex>> derivatives;  // (r, alpha)
    bool measure_l2 = true;
    bool measure_sup = true;
    double window_fraction = 0.8;
    bool allow_unstable = false;  // conditional experiments (spectral cutoff)
    int threads = 0;              // 0: HYPERDISP_THREADS or 1
};

PropagatorRun run_decay_experiment(const SymbolSpec& S, const ExperimentConfig& cfg);

enum class FitMode { Power, Exponential };

struct DecayFit {
    double exponent = 0.0;  // rho^ for power (positive = decay), delta^ for exponential
    double residual_rms = 0.0;
    double half_width = 0.0;  // standard error of the slope
    double window_lo = 0.0, window_hi = 0.0;
    int points = 0;
    bool low_confidence = false;  // non-monotone tail beyond tolerance
};

DecayFit fit_exponent(const std::vector<std::pair<double, double>>& series, double window_lo,
                      double window_hi, FitMode mode);

}  // namespace hyperdisp

#endif
