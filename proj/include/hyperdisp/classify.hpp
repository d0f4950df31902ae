#ifndef HYPERDISP_CLASSIFY_HPP
#define HYPERDISP_CLASSIFY_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyperdisp/roots.hpp"

namespace hyperdisp {

struct ClassifyTolerances {
    double axis_tol = 1e-9;        // Im tau < axis_tol*(1+|tau|) counts as on-axis
    double sep_threshold = 1e-3;   // inf Im above this declares Separated(delta)
    double onaxis_fraction = 0.995;  // fraction of on-axis cells for an OnAxis verdict
    double fit_window_lo = 2.0;    // s-fit window in grid steps
    double fit_window_hi = 20.0;
    double fit_residual_max = 0.25;  // RMS of log-log fit above this flags low confidence
    int contact_cap = 8;           // contact orders beyond this report Infinite
    int sigma_samples = 16;        // directions per level curve (multiple of 4)
    int lambda_samples = 3;
    int extra_planes = 8;          // random planes through the normal, n >= 3
    double smallxi_c0 = 0.05;      // |d_omega tau| lower bound for Part II on-axis rows
    double shell_fraction = 0.75;  // |xi| >= fraction * R is the large-frequency shell
    double mult_margin = 4.0;      // multiplicity neighborhood radius, in grid steps
    std::uint64_t seed = 12345;    // random plane rotations
};

enum class AxisKind { Separated, OnAxis, MeetsFiniteOrder, UnclassifiedAsymptotic };

struct AxisBehavior {
    AxisKind kind = AxisKind::OnAxis;
    double delta = 0.0;  // Separated: measured inf of Im tau over the region
    int s = 0;           // MeetsFiniteOrder: contact order
    double c0 = 0.0;
    std::optional<int> s1;  // |tau| <= c1 |xi - xi0|^{s1} when the contact is a point
    double c1 = 0.0;
    std::vector<std::int64_t> contact_cells;  // Z_k within the region
    bool contact_at_origin = false;
    bool isolated_point = false;
    bool parity_rounded = false;  // raw fit was odd, rounded to even
    bool low_confidence = false;
    double raw_s = 0.0, raw_s1 = 0.0;
    double fit_residual = 0.0;
    int contact_codim = 0;  // ell of the contact set Z_k (MeetsFiniteOrder)
};

struct MultiplicitySet {
    std::vector<int> labels;  // participating labels, L = labels.size() >= 2
    std::vector<std::int64_t> cells;
    int L = 0;
    int codim = 0;  // ell
    double codim_slope = 0.0, codim_residual = 0.0;
    bool contains_axis = false;
};

enum class HessKind { NonDegenerate, RankDeficient, Degenerate };

struct HessianClass {
    HessKind kind = HessKind::Degenerate;
    double M = 0.0;   // fitted exponent: |det Hess| >= C0 (1+|xi|)^{-M}
    double C0 = 0.0;
    int rank = 0;     // RankDeficient: attained rank
    int evidence = 0;
    double min_abs_det = 0.0;
    bool critical_ok = true;  // isolated critical point probe (Newton + definiteness)
};

struct ContactIndex {
    bool convex = true;
    int gamma = 2;
    int gamma0 = 2;
    bool infinite_flag = false;
    bool low_confidence = false;
    int planes_sampled = 1;
    // (lambda, gamma(Sigma_lambda), gamma0(Sigma_lambda))
    std::vector<std::array<double, 3>> per_lambda;
};

struct StabilityVerdict {
    bool pass = false;
    double min_im = 0.0;
    std::int64_t argmin_node = -1;
    int argmin_label = -1;
};

enum class ZoneKind { LargeShell, BoundedNoMult, MultNeighborhood };

struct RootClassification {
    AxisBehavior axis;
    std::optional<HessianClass> hessian;
    std::optional<ContactIndex> contact;
    bool smallxi_ok = true;  // Part II regularity condition
};

struct Zone {
    int id = 0;
    ZoneKind kind = ZoneKind::BoundedNoMult;
    std::vector<std::int64_t> cells;
    std::map<int, RootClassification> per_root;
    int mult_index = -1;  // MultNeighborhood: index into ZoneReport::mults
    // MultNeighborhood collective behavior of the participating roots
    AxisBehavior collective;
};

struct ZoneReport {
    int dim = 0;
    int order = 0;
    std::string symbol_name;
    StabilityVerdict stability;
    std::vector<MultiplicitySet> mults;
    std::vector<Zone> zones;
    double grid_radius = 0.0;
    double edge_min_im = 1e300;  // inf of Im tau over the outermost cells
    bool region_restricted = false;
    double exclusion_radius = 0.0;

    std::string to_json() const;
    std::string to_text() const;
};

// --- operations ---

StabilityVerdict stability_scan(const RootField& field);

AxisBehavior axis_behavior(const RootField& field, int k,
                           const std::vector<std::int64_t>& region,
                           const ClassifyTolerances& tol = {});

std::vector<MultiplicitySet> detect_multiplicities(const RootField& field,
                                                   const ClassifyTolerances& tol = {});

/// ell from the slope of log meas(M^eps) vs log eps (cell counting with x2
/// subcell refinement near the set), rounded into [1, n].
int estimate_codimension(MultiplicitySet& set, const FrequencyGrid& grid,
                         const ClassifyTolerances& tol = {});

HessianClass hessian_class(const SymbolSpec& S, const RootField& field, int k,
                           const std::vector<std::int64_t>& region,
                           const ClassifyTolerances& tol = {});

/// Samples Sigma_lambda(tau_k) intersected with the plane spanned by (u,v)
/// through the origin; roots along rays found by bracketed 1D solves.
/// Root label = index in the (Re, Im)-sorted order, stable on real-rooted rays.
struct LevelCurve {
    double lambda = 0.0;
    std::vector<double> theta;                  // directions that bracketed
    std::vector<double> rho;                    // radii with tau_k(rho omega) = lambda
    std::vector<std::array<double, 2>> points;  // in-plane coordinates
    int skipped_directions = 0;
};
LevelCurve level_set_trace(const SymbolSpec& S, int k, double lambda,
                           const std::vector<double>& plane_u, const std::vector<double>& plane_v,
                           int directions = 64);

/// Contact order of the curve against its tangent at samples[sigma_index]:
/// least k >= 2 with the k-th Taylor coefficient of the tangent-deviation
/// graph above the noise floor; 0 encodes the Infinite flag (beyond cap).
int contact_order(const std::vector<std::array<double, 2>>& samples, int sigma_index,
                  const ClassifyTolerances& tol = {});

ContactIndex convexity_indices(const SymbolSpec& S, int k, const std::vector<double>& lambdas,
                               const ClassifyTolerances& tol = {});

struct ZoneReportOptions {
    ClassifyTolerances tol;
    double exclusion_radius = 0.0;  // drop cells with |xi| <= radius (spectral cutoff)
};

ZoneReport build_zone_report(const SymbolSpec& S, const RootField& field,
                             const ZoneReportOptions& opt = {});

}  // namespace hyperdisp

#endif
