#include "hyperdisp/pipeline.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hyperdisp {

namespace {

FrequencyGrid grid_from_json(const nlohmann::json& j, int dim) {
    if (j.contains("axes")) {
        std::vector<FrequencyGrid::Axis> axes;
        for (const auto& a : j.at("axes"))
            axes.push_back({a.at("min").get<double>(), a.at("max").get<double>(),
                            a.at("count").get<int>()});
        return FrequencyGrid::cartesian(std::move(axes));
    }
    double radius = j.at("radius").get<double>();
    int count = j.at("count").get<int>();
    return FrequencyGrid::symmetric(dim, radius, count);
}

}  // namespace

JobConfig JobConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }
    JobConfig cfg;
    try {
        const auto& sym = j.at("symbol");
        if (sym.contains("corpus")) {
            cfg.corpus_name = sym.at("corpus").get<std::string>();
            if (!corpus_has(cfg.corpus_name))
                throw std::invalid_argument("config: unknown corpus symbol '" + cfg.corpus_name +
                                            "'");
        } else if (sym.contains("file")) {
            cfg.symbol_file = sym.at("file").get<std::string>();
        } else if (sym.contains("inline")) {
            cfg.inline_symbol = sym.at("inline").dump();
        } else if (sym.contains("fokker_planck")) {
            cfg.fp_N = sym.at("fokker_planck").at("N").get<int>();
            cfg.fp_n = sym.at("fokker_planck").at("n").get<int>();
        } else {
            throw std::invalid_argument(
                "config: symbol needs one of corpus/file/inline/fokker_planck");
        }

        // dimension needed for grid parsing; resolve the symbol once
        SymbolSpec S = cfg.resolve_symbol();
        if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"), S.dim);
        if (j.contains("sim_grid")) cfg.sim_grid = grid_from_json(j.at("sim_grid"), S.dim);
        if (j.contains("times")) {
            cfg.ladder.t_min = j.at("times").value("min", 1.0);
            cfg.ladder.t_max = j.at("times").value("max", 400.0);
            cfg.ladder.count = j.at("times").value("count", 24);
        }
        if (j.contains("fit_window")) {
            cfg.fit_lo = j.at("fit_window").at(0).get<double>();
            cfg.fit_hi = j.at("fit_window").at(1).get<double>();
        }
        if (j.contains("pq")) {
            cfg.pq.clear();
            for (const auto& pair : j.at("pq"))
                cfg.pq.push_back(PQ::parse(pair.at(0).get<std::string>(),
                                           pair.at(1).get<std::string>()));
        }
        if (j.contains("derivatives")) {
            for (const auto& d : j.at("derivatives")) {
                int r = d.value("r", 0);
                MultiIndex alpha = d.contains("alpha") ? d.at("alpha").get<MultiIndex>()
                                                       : MultiIndex(S.dim, 0);
                if (static_cast<int>(alpha.size()) != S.dim)
                    throw std::invalid_argument("config: derivative alpha length mismatch");
                cfg.derivatives.push_back({r, alpha});
            }
        }
        if (j.contains("data")) {
            const auto& d = j.at("data");
            std::string kind = d.value("kind", "unit");
            if (kind == "unit") cfg.data.kind = CauchyData::Kind::Unit;
            else if (kind == "gaussian") cfg.data.kind = CauchyData::Kind::Gaussian;
            else if (kind == "indicator_band") cfg.data.kind = CauchyData::Kind::IndicatorBand;
            else if (kind == "ring_band") cfg.data.kind = CauchyData::Kind::RingBand;
            else throw std::invalid_argument("config: unknown data kind '" + kind + "'");
            cfg.data.sigma = d.value("sigma", 1.0);
            cfg.data.r0 = d.value("r0", 1.0);
            cfg.data.width = d.value("width", 0.5);
            cfg.data.component = d.value("component", -1);
            cfg.data.exclude_ball = d.value("exclude_ball", 0.0);
        }
        cfg.window_fraction = j.value("window_fraction", 0.8);
        cfg.exclusion_radius = j.value("exclusion_radius", 0.0);
        if (cfg.exclusion_radius > 0.0 && cfg.data.exclude_ball == 0.0)
            cfg.data.exclude_ball = cfg.exclusion_radius;
        cfg.fp_mode = j.value("fokker_planck_prediction", false);
        cfg.export_roots = j.value("export_roots", false);
        cfg.seed = j.value("seed", std::uint64_t{12345});
        cfg.threads = j.value("threads", 0);
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            cfg.tol.axis_tol = t.value("axis_tol", cfg.tol.axis_tol);
            cfg.tol.sep_threshold = t.value("sep_threshold", cfg.tol.sep_threshold);
            cfg.tol.shell_fraction = t.value("shell_fraction", cfg.tol.shell_fraction);
            cfg.tol.mult_margin = t.value("mult_margin", cfg.tol.mult_margin);
            cfg.tol.sigma_samples = t.value("sigma_samples", cfg.tol.sigma_samples);
            cfg.tol.lambda_samples = t.value("lambda_samples", cfg.tol.lambda_samples);
            if (cfg.tol.sep_threshold <= 0 || cfg.tol.sep_threshold > 1.0)
                throw std::invalid_argument("config: sep_threshold outside (0, 1]");
            if (cfg.tol.shell_fraction <= 0.1 || cfg.tol.shell_fraction >= 1.0)
                throw std::invalid_argument("config: shell_fraction outside (0.1, 1)");
        }
        cfg.tol.seed = cfg.seed;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return cfg;
}

JobConfig JobConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

SymbolSpec JobConfig::resolve_symbol() const {
    if (!corpus_name.empty()) return corpus_get(corpus_name).symbol;
    if (!symbol_file.empty()) {
        std::ifstream in(symbol_file);
        if (!in) throw std::invalid_argument("config: cannot open symbol file '" + symbol_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return symbol_from_json(ss.str(), symbol_file);
    }
    if (!inline_symbol.empty()) return symbol_from_json(inline_symbol, "inline");
    if (fp_N > 0) return fokker_planck_symbol(fp_N, fp_n).symbol;
    throw std::invalid_argument("config: no symbol source");
}

FrequencyGrid JobConfig::analysis_grid(const SymbolSpec& S) const {
    if (grid) return *grid;
    switch (S.dim) {
        case 1: return FrequencyGrid::symmetric(1, 2.0, 2048);
        case 2: return FrequencyGrid::symmetric(2, 2.0, 256);
        default: return FrequencyGrid::symmetric(3, 2.0, 48);
    }
}

FrequencyGrid JobConfig::simulation_grid(const SymbolSpec& S) const {
    if (sim_grid) return *sim_grid;
    if (S.dim == 1) return FrequencyGrid::symmetric(1, 64.0, 1 << 14);
    if (S.dim == 2) return FrequencyGrid::symmetric(2, 32.0, 1024);
    throw std::invalid_argument("config: sim_grid required for n = 3");
}

// --- analyze ---

AnalyzeResult analyze(const JobConfig& cfg) {
    SymbolSpec S = cfg.resolve_symbol();
    FrequencyGrid g = cfg.analysis_grid(S);
    RootField field = track_field(S, g);
    ZoneReportOptions opt;
    opt.tol = cfg.tol;
    opt.exclusion_radius = cfg.exclusion_radius;
    AnalyzeResult res{build_zone_report(S, field, opt), {}, std::nullopt, {}};
    if (cfg.export_roots) res.roots_csv = field_to_csv(field);
    for (const PQ& pq : cfg.pq) res.predictions.push_back({pq, predict_report(res.report, pq)});
    if (cfg.fp_mode) res.fp = fp_prediction(res.report);
    return res;
}

bool AnalyzeResult::any_abstention() const {
    for (const auto& [pq, out] : predictions)
        if (out.prediction.abstained || !out.prediction.abstain_reasons.empty()) return true;
    if (fp && fp->abstained) return true;
    return false;
}

namespace {

nlohmann::json kfactor_json(const KFactor& k) {
    return {{"rho", k.rho.str()},
            {"lambda", k.lambda},
            {"delta", k.delta},
            {"row", k.provenance},
            {"shrinking_region", k.shrinking_region}};
}

nlohmann::json prediction_json(const PQ& pq, const PredictOutcome& out) {
    nlohmann::json pj;
    pj["pq"] = pq.str();
    pj["abstained"] = out.prediction.abstained;
    pj["abstain_reasons"] = out.prediction.abstain_reasons;
    if (!out.prediction.abstained) {
        pj["K"] = kfactor_json(out.prediction.K);
        if (out.prediction.exponential_only) {
            pj["kappa"] = "inf";
        } else {
            pj["kappa"] = out.prediction.kappa.str();
            StrichartzExponents st = strichartz_pair(out.prediction.kappa);
            if (st.admissible) {
                Rational q(st.inv_q.den, st.inv_q.num), qc(st.inv_q_conj.den, st.inv_q_conj.num);
                pj["strichartz"] = {{"q", q.str()}, {"q_conj", qc.str()}, {"admissible", true}};
            } else {
                pj["strichartz"] = {{"admissible", false}};
            }
        }
        nlohmann::json imp;
        imp["time_gain"] = out.prediction.improvements.time_gain;
        if (out.prediction.improvements.time_gain)
            imp["per_r"] = out.prediction.improvements.per_r.str();
        imp["space_gain"] = out.prediction.improvements.space_gain;
        if (out.prediction.improvements.space_gain)
            imp["per_alpha"] = out.prediction.improvements.per_alpha.str();
        pj["improvements"] = imp;
        pj["sobolev_note"] = out.prediction.sobolev_note;
        nlohmann::json shr = nlohmann::json::array();
        for (const auto& k : out.prediction.shrinking_rows) shr.push_back(kfactor_json(k));
        pj["shrinking_rows"] = shr;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& tr : out.trace) {
        nlohmann::json rj;
        rj["zone"] = tr.zone_id;
        rj["row"] = tr.row_id;
        rj["abstained"] = tr.abstained;
        if (tr.abstained) rj["reason"] = tr.reason;
        else if (tr.K) rj["K"] = kfactor_json(*tr.K);
        rows.push_back(rj);
    }
    pj["rows"] = rows;
    return pj;
}

}  // namespace

std::string AnalyzeResult::to_json() const {
    nlohmann::json j;
    j["zone_report"] = nlohmann::json::parse(report.to_json());
    j["predictions"] = nlohmann::json::array();
    for (const auto& [pq, out] : predictions) j["predictions"].push_back(prediction_json(pq, out));
    if (fp) {
        nlohmann::json fj;
        fj["abstained"] = fp->abstained;
        if (fp->abstained) fj["reasons"] = fp->abstain_reasons;
        else {
            fj["poly_rate"] = fp->fp_poly_rate.str();
            fj["eps"] = fp->fp_eps;
        }
        j["fokker_planck"] = fj;
    }
    return j.dump(2);
}

std::string AnalyzeResult::to_text() const {
    std::ostringstream os;
    os << report.to_text();
    for (const auto& [pq, out] : predictions) {
        os << "prediction " << pq.str() << ": ";
        if (out.prediction.abstained) {
            os << "abstained";
            for (const auto& r : out.prediction.abstain_reasons) os << "\n   - " << r;
            os << "\n";
            continue;
        }
        const KFactor& K = out.prediction.K;
        os << "K(t) = <t>^" << (K.rho + Rational(K.lambda)).str();
        if (K.delta > 0) os << " e^(-" << K.delta << " t)";
        if (out.prediction.exponential_only) os << "  kappa = +inf";
        else os << "  kappa = " << out.prediction.kappa.str();
        os << "   [" << K.provenance << "]\n";
        if (out.prediction.improvements.time_gain)
            os << "   time-derivative gain: +r*" << out.prediction.improvements.per_r.str() << "\n";
        if (out.prediction.improvements.space_gain)
            os << "   space-derivative gain: +|alpha|*"
               << out.prediction.improvements.per_alpha.str() << "\n";
        for (const auto& k : out.prediction.shrinking_rows)
            os << "   shrinking-neighborhood row (L1->Linf only): <t>^"
               << (k.rho + Rational(k.lambda)).str() << " [" << k.provenance << "]\n";
        for (const auto& r : out.prediction.abstain_reasons) os << "   note: " << r << "\n";
    }
    if (fp) {
        os << "fokker-planck: ";
        if (fp->abstained) {
            os << "abstained";
            for (const auto& r : fp->abstain_reasons) os << "\n   - " << r;
            os << "\n";
        } else {
            os << "<t>^-" << fp->fp_poly_rate.str() << " + e^(-" << fp->fp_eps << " t)\n";
        }
    }
    return os.str();
}

// --- simulate ---

PropagatorRun simulate(const JobConfig& cfg) {
    SymbolSpec S = cfg.resolve_symbol();
    ExperimentConfig ec;
    ec.grid = cfg.simulation_grid(S);
    ec.ladder = cfg.ladder;
    ec.data = cfg.data;
    ec.derivatives = cfg.derivatives;
    ec.window_fraction = cfg.window_fraction;
    ec.allow_unstable = cfg.data.exclude_ball > 0.0;
    ec.threads = cfg.threads;
    return run_decay_experiment(S, ec);
}

std::string run_sidecar_json(const PropagatorRun& run, const JobConfig& cfg) {
    nlohmann::json j;
    j["symbol"] = run.symbol;
    j["component"] = run.component;
    j["kernel"] = run.kernel;
    j["fits"] = nlohmann::json::array();
    std::vector<std::pair<int, MultiIndex>> derivs = cfg.derivatives;
    if (derivs.empty()) derivs.push_back({0, MultiIndex(run.grid.dim, 0)});
    for (const auto& [r, alpha] : derivs) {
        for (const std::string& q : {std::string("inf"), std::string("2")}) {
            auto series = run.series(q, r, abs_index(alpha));
            if (series.size() < 6) continue;
            try {
                DecayFit fit = fit_exponent(series, cfg.fit_lo, cfg.fit_hi, FitMode::Power);
                j["fits"].push_back({{"q", q},
                                     {"r", r},
                                     {"alpha", abs_index(alpha)},
                                     {"exponent", fit.exponent},
                                     {"half_width", fit.half_width},
                                     {"residual_rms", fit.residual_rms},
                                     {"low_confidence", fit.low_confidence},
                                     {"window", {fit.window_lo, fit.window_hi}}});
            } catch (const std::exception&) {
                continue;
            }
        }
    }
    return j.dump(2);
}

// --- verify ---

int VerifyReport::exit_code() const {
    bool any_mismatch = false, any_match = false;
    for (const auto& r : rows) {
        if (r.verdict == "mismatch") any_mismatch = true;
        if (r.verdict == "match") any_match = true;
    }
    if (any_mismatch) return 2;
    if (!any_match && !rows.empty()) return 3;
    if (rows.empty()) return 3;
    return 0;
}

std::string VerifyReport::to_json() const {
    nlohmann::json j;
    j["stability_failed"] = stability_failed;
    j["note"] = note;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"pq", r.pq},
                             {"r", r.r},
                             {"alpha", r.alpha_abs},
                             {"verdict", r.verdict},
                             {"reason", r.reason},
                             {"exponential", r.exponential},
                             {"predicted", r.predicted},
                             {"measured", r.measured},
                             {"half_width", r.half_width},
                             {"provenance", r.provenance}});
    return j.dump(2);
}

std::string VerifyReport::to_text() const {
    std::ostringstream os;
    if (stability_failed) os << "stability failed: " << note << "\n";
    for (const auto& r : rows) {
        os << r.pq << " r=" << r.r << " |alpha|=" << r.alpha_abs << ": " << r.verdict;
        if (r.verdict != "abstained")
            os << "  predicted=" << r.predicted << " measured=" << r.measured << " +- "
               << r.half_width;
        if (!r.reason.empty()) os << "  (" << r.reason << ")";
        os << "\n";
    }
    return os.str();
}

VerifyReport verify(const JobConfig& cfg) {
    VerifyReport rep;
    AnalyzeResult an = analyze(cfg);

    if (!an.report.stability.pass) {
        rep.stability_failed = true;
        rep.note = "stability condition Im tau >= 0 fails; no decay expected";
        for (const PQ& pq : cfg.pq) {
            VerifyRow row;
            row.pq = pq.str();
            row.verdict = "abstained";
            row.reason = "no decay expected (unstable symbol)";
            rep.rows.push_back(row);
        }
        return rep;
    }

    PropagatorRun run = simulate(cfg);
    std::vector<std::pair<int, MultiIndex>> derivs = cfg.derivatives;
    if (derivs.empty()) derivs.push_back({0, MultiIndex(run.grid.dim, 0)});

    for (const auto& [pq, out] : an.predictions) {
        std::string qkey;
        if (pq.inv_q == Rational(0)) qkey = "inf";
        else if (pq.inv_q == Rational(1, 2)) qkey = "2";

        for (const auto& [r, alpha] : derivs) {
            VerifyRow row;
            row.pq = pq.str();
            row.r = r;
            row.alpha_abs = abs_index(alpha);

            if (out.prediction.abstained) {
                row.verdict = "abstained";
                row.reason = out.prediction.abstain_reasons.empty()
                                 ? "prediction abstained"
                                 : out.prediction.abstain_reasons.front();
                rep.rows.push_back(row);
                continue;
            }
            if (qkey.empty()) {
                row.verdict = "abstained";
                row.reason = "norms measured only for q in {2, inf}";
                rep.rows.push_back(row);
                continue;
            }
            auto series = run.series(qkey, r, row.alpha_abs);
            if (series.size() < 6) {
                row.verdict = "abstained";
                row.reason = "run has too few samples for this (q, r, alpha)";
                rep.rows.push_back(row);
                continue;
            }
            row.provenance = out.prediction.K.provenance;
            try {
                if (out.prediction.exponential_only) {
                    row.exponential = true;
                    row.predicted = out.prediction.K.delta;
                    DecayFit fit =
                        fit_exponent(series, cfg.fit_lo, cfg.fit_hi, FitMode::Exponential);
                    row.measured = fit.exponent;
                    row.half_width = fit.half_width;
                    double tol = std::max(0.15 * row.predicted, 2.0 * fit.half_width);
                    row.verdict = std::abs(row.predicted - row.measured) <= tol ? "match"
                                                                                : "mismatch";
                } else {
                    Rational kappa = out.prediction.kappa;
                    if (out.prediction.improvements.time_gain && r > 0)
                        kappa = kappa + Rational(r) * out.prediction.improvements.per_r;
                    if (out.prediction.improvements.space_gain && row.alpha_abs > 0)
                        kappa = kappa +
                                Rational(row.alpha_abs) * out.prediction.improvements.per_alpha;
                    row.predicted = kappa.value();
                    DecayFit fit = fit_exponent(series, cfg.fit_lo, cfg.fit_hi, FitMode::Power);
                    row.measured = fit.exponent;
                    row.half_width = fit.half_width;
                    double tol = std::max(0.15, 2.0 * fit.half_width);
                    row.verdict = std::abs(row.predicted - row.measured) <= tol ? "match"
                                                                                : "mismatch";
                }
            } catch (const std::exception& e) {
                row.verdict = "abstained";
                row.reason = e.what();
            }
            rep.rows.push_back(row);
        }
    }
    if (an.fp) {
        VerifyRow row;
        row.pq = "(1,inf)";
        if (an.fp->abstained) {
            row.verdict = "abstained";
            row.reason = an.fp->abstain_reasons.empty() ? "fp abstained"
                                                        : an.fp->abstain_reasons.front();
        } else {
            row.predicted = an.fp->fp_poly_rate.value();
            row.provenance = "FP:two_term";
            auto series = run.series("inf", 0, 0);
            try {
                DecayFit fit = fit_exponent(series, cfg.fit_lo, cfg.fit_hi, FitMode::Power);
                row.measured = fit.exponent;
                row.half_width = fit.half_width;
                double tol = std::max(0.15, 2.0 * fit.half_width);
                row.verdict = std::abs(row.predicted - row.measured) <= tol ? "match" : "mismatch";
            } catch (const std::exception& e) {
                row.verdict = "abstained";
                row.reason = e.what();
            }
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace hyperdisp
