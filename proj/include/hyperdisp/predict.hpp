#ifndef HYPERDISP_PREDICT_HPP
#define HYPERDISP_PREDICT_HPP

#include <optional>
#include <string>
#include <vector>

#include "hyperdisp/classify.hpp"
#include "hyperdisp/rational.hpp"

namespace hyperdisp {

/// Conjugate (p,q) pair stored as exact inverses; q = infinity is inv_q = 0.
struct PQ {
    Rational inv_p{1};
    Rational inv_q{0};
    Rational diff() const { return inv_p - inv_q; }  // 1/p - 1/q
    static PQ parse(const std::string& p, const std::string& q);
    std::string str() const;
};

/// One factor of the decay envelope: <t>^rho * <t>^lambda * e^(-delta t).
struct KFactor {
    Rational rho{0};   // <= 0 for decay
    int lambda = 0;    // polynomial growth from multiplicity resolution
    double delta = 0;  // exponential rate, 0 = none
    std::string provenance;  // table row id + zone id
    bool shrinking_region = false;  // the ** row: L^1->L^inf in a shrinking neighborhood

    /// "decays slower": smaller delta is slower; ties compare rho+lambda,
    /// larger is slower. Deterministic total order.
    bool slower_than(const KFactor& o) const {
        if (delta != o.delta) return delta < o.delta;
        Rational a = rho + Rational(lambda), b = o.rho + Rational(o.lambda);
        if (a != b) return b < a;
        return false;
    }
};

struct RowResult {
    std::vector<KFactor> rows;
    bool abstained = false;
    std::string reason;
};

struct Improvements {
    bool time_gain = false;   // extra r * s1/s per time derivative
    Rational per_r{0};
    bool space_gain = false;  // extra |alpha|/s per space derivative
    Rational per_alpha{0};
};

struct DecayPrediction {
    KFactor K;
    bool exponential_only = false;  // kappa = +infinity sentinel
    Rational kappa{0};
    Improvements improvements;
    std::string sobolev_note;
    bool abstained = false;
    std::vector<std::string> abstain_reasons;
    std::vector<KFactor> shrinking_rows;  // reported apart, excluded from kappa
    // Fokker-Planck two-term form <t>^(-n/2) + e^(-eps t)
    bool fp_two_term = false;
    Rational fp_poly_rate{0};
    double fp_eps = 0.0;
};

struct StrichartzExponents {
    Rational inv_q{0}, inv_q_conj{0};
    bool admissible = false;
};

// --- table rows (Part I: |xi| >= M) ---
RowResult row_large_freq(const RootClassification& rc, int n, const PQ& pq,
                         const std::string& zone_tag);

// --- table rows (Part II: bounded |xi|) ---
RowResult row_bounded_freq(const RootClassification& rc, int n, const PQ& pq,
                           const std::string& zone_tag);
RowResult row_bounded_mult(const AxisBehavior& collective, int L, int ell, const PQ& pq,
                           const std::string& zone_tag);

/// Slowest-decaying row wins; kappa derived; shrinking-region rows are kept
/// apart and never enter kappa.
DecayPrediction combine(const std::vector<KFactor>& rows, const PQ& pq);

/// 1/q - 1/q' = 1 - kappa with q' conjugate; admissible iff 0 < kappa < 1.
StrichartzExponents strichartz_pair(const Rational& kappa);

/// Strong-stability-gated Fokker-Planck prediction <t>^(-n/2) + e^(-eps t)
/// with eps the measured infimum of Im tau at the grid edge.
DecayPrediction fp_prediction(const ZoneReport& report);

/// Full-report prediction: every zone feeds its table rows, combine picks the
/// envelope, improvement exponents attach when the report certifies them.
struct PredictionRowTrace {
    int zone_id = -1;
    std::string row_id;
    std::optional<KFactor> K;
    bool abstained = false;
    std::string reason;
};
struct PredictOutcome {
    DecayPrediction prediction;
    std::vector<PredictionRowTrace> trace;
};
PredictOutcome predict_report(const ZoneReport& report, const PQ& pq);

/// Inventory of implemented table-row ids (totality check against the
/// twelve rows of the two tables).
std::vector<std::string> table_row_ids();

}  // namespace hyperdisp

#endif
