#ifndef HYPERDISP_PIPELINE_HPP
#define HYPERDISP_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperdisp/classify.hpp"
#include "hyperdisp/corpus.hpp"
#include "hyperdisp/predict.hpp"
#include "hyperdisp/propagate.hpp"

namespace hyperdisp {

/// One config file drives analyze / simulate / verify.
struct JobConfig {
    // symbol source (exactly one)
    std::string corpus_name;
    std::string symbol_file;
    std::string inline_symbol;  // JSON text
    int fp_N = 0, fp_n = 0;

    std::optional<FrequencyGrid> grid;      // analysis grid
    std::optional<FrequencyGrid> sim_grid;  // simulation grid
    TimeLadder ladder;
    double fit_lo = 20.0, fit_hi = 400.0;
    std::vector<PQ> pq{PQ{}};  // default (1, inf)
    std::vector<std::pair<int, MultiIndex>> derivatives;
    CauchyData data;
    double window_fraction = 0.8;
    double exclusion_radius = 0.0;
    bool fp_mode = false;  // emit the Fokker-Planck two-term prediction
    bool export_roots = false;  // attach the RootField CSV to analyze output
    ClassifyTolerances tol;
    std::uint64_t seed = 12345;
    int threads = 0;

    static JobConfig from_json(const std::string& text);
    static JobConfig from_file(const std::string& path);

    SymbolSpec resolve_symbol() const;
    FrequencyGrid analysis_grid(const SymbolSpec& S) const;
    FrequencyGrid simulation_grid(const SymbolSpec& S) const;
};

struct AnalyzeResult {
    ZoneReport report;
    std::vector<std::pair<PQ, PredictOutcome>> predictions;
    std::optional<DecayPrediction> fp;  // fp_mode only
    std::string roots_csv;              // filled when export_roots is set

    std::string to_json() const;
    std::string to_text() const;
    bool any_abstention() const;
};

AnalyzeResult analyze(const JobConfig& cfg);
PropagatorRun simulate(const JobConfig& cfg);

struct VerifyRow {
    std::string pq;
    int r = 0;
    int alpha_abs = 0;
    std::string verdict;  // "match" / "mismatch" / "abstained"
    std::string reason;
    bool exponential = false;
    double predicted = 0.0;  // exponent (power) or rate (exponential)
    double measured = 0.0;
    double half_width = 0.0;
    std::string provenance;  // winning table row
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool stability_failed = false;
    std::string note;

    int exit_code() const;  // 0 all-match, 2 any-mismatch, 3 abstentions-only
    std::string to_json() const;
    std::string to_text() const;
};

VerifyReport verify(const JobConfig& cfg);

/// Fit sidecar for simulate output.
std::string run_sidecar_json(const PropagatorRun& run, const JobConfig& cfg);

}  // namespace hyperdisp

#endif
