#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "hyperdisp/pipeline.hpp"

using namespace hyperdisp;

TEST_CASE("corpus catalog") {
    std::vector<std::string> names = corpus_names();
    CHECK(names.size() >= 7);
    for (const auto& n : names) {
        CorpusEntry e = corpus_get(n);
        CHECK_FALSE(e.provenance.empty());
        e.symbol.validate();
    }
    CorpusEntry g = corpus_get("grad13_2d");
    CHECK(g.symbol.order == 9);
    CHECK(g.symbol.dim == 2);
    CHECK_THROWS_AS(corpus_get("no_such_symbol"), std::invalid_argument);
}

TEST_CASE("config parsing: happy path") {
    std::string text = R"({
      "symbol": {"corpus": "kg_1d"},
      "grid": {"radius": 2.0, "count": 256},
      "sim_grid": {"radius": 64.0, "count": 16384},
      "times": {"min": 1, "max": 400, "count": 24},
      "fit_window": [20, 400],
      "pq": [["1", "inf"], ["4/3", "4"]],
      "derivatives": [{"r": 0, "alpha": [0]}, {"r": 1, "alpha": [0]}],
      "data": {"kind": "gaussian", "sigma": 2.0, "component": 1},
      "seed": 777
    })";
    JobConfig cfg = JobConfig::from_json(text);
    CHECK(cfg.corpus_name == "kg_1d");
    CHECK(cfg.pq.size() == 2);
    CHECK(cfg.derivatives.size() == 2);
    CHECK(cfg.seed == 777);
    SymbolSpec S = cfg.resolve_symbol();
    CHECK(S.dim == 1);
    CHECK(cfg.analysis_grid(S).node_count() == 256);
    CHECK(cfg.simulation_grid(S).node_count() == 16384);
}

TEST_CASE("config parsing: diagnostics carry the failing path") {
    CHECK_THROWS_WITH_AS(JobConfig::from_json("{"), doctest::Contains("parse error"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(JobConfig::from_json(R"({"symbol": {"corpus": "nope"}})"),
                         doctest::Contains("unknown corpus"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(JobConfig::from_json(R"({"symbol": {}})"),
                         doctest::Contains("symbol"), std::invalid_argument);
    // tolerance overrides outside the documented sane ranges
    CHECK_THROWS_AS(JobConfig::from_json(R"({
        "symbol": {"corpus": "kg_1d"},
        "tolerances": {"sep_threshold": 7.0}
      })"),
                    std::invalid_argument);
    // alpha length must match the symbol dimension
    CHECK_THROWS_AS(JobConfig::from_json(R"({
        "symbol": {"corpus": "kg_1d"},
        "derivatives": [{"r": 0, "alpha": [1, 0]}]
      })"),
                    std::invalid_argument);
}

TEST_CASE("inline and fokker_planck symbol sources") {
    std::string inline_cfg = R"({
      "symbol": {"inline": {
        "dimension": 1, "order": 2,
        "principal": [{"degree": 1, "terms": []},
                       {"degree": 2, "terms": [{"alpha": [2], "re": -1.0, "im": 0.0}]}],
        "lower": [{"alpha": [0], "r": 0, "re": -1.0, "im": 0.0}]
      }}
    })";
    JobConfig cfg = JobConfig::from_json(inline_cfg);
    SymbolSpec S = cfg.resolve_symbol();
    CHECK(S.order == 2);  // an inline Klein-Gordon
    TauPolynomial p = evaluate_symbol(S, {0.0});
    CHECK(std::abs(p.coeff[2] - Complex(-1.0)) < 1e-15);

    JobConfig fp = JobConfig::from_json(R"({"symbol": {"fokker_planck": {"N": 1, "n": 1}}})");
    CHECK(fp.resolve_symbol().order == 2);
}

TEST_CASE("analyze report JSON re-parses under the schema") {
    JobConfig cfg;
    cfg.corpus_name = "kg_1d";
    cfg.grid = FrequencyGrid::cartesian({{-2.0, 2.0, 256}});
    AnalyzeResult res = analyze(cfg);
    nlohmann::json j = nlohmann::json::parse(res.to_json());
    CHECK(j.contains("zone_report"));
    CHECK(j.contains("predictions"));
    CHECK(j["zone_report"].contains("stability"));
    CHECK(j["zone_report"]["stability"]["pass"].get<bool>());
    for (const auto& p : j["predictions"]) {
        CHECK(p.contains("pq"));
        CHECK(p.contains("rows"));
    }
}

TEST_CASE("determinism: identical config and seed give byte-identical outputs") {
    std::string text = R"({
      "symbol": {"corpus": "wave_1d"},
      "sim_grid": {"radius": 8.0, "count": 512},
      "times": {"min": 1, "max": 50, "count": 8},
      "fit_window": [2, 50],
      "data": {"kind": "gaussian", "sigma": 2.0, "component": 1},
      "seed": 99
    })";
    JobConfig a = JobConfig::from_json(text);
    JobConfig b = JobConfig::from_json(text);
    PropagatorRun ra = simulate(a), rb = simulate(b);
    CHECK(ra.to_csv() == rb.to_csv());
    CHECK(run_sidecar_json(ra, a) == run_sidecar_json(rb, b));

    JobConfig c = JobConfig::from_json(R"({
      "symbol": {"corpus": "kg_1d"}, "grid": {"radius": 2.0, "count": 128}})");
    CHECK(analyze(c).to_json() == analyze(c).to_json());
}

TEST_CASE("verify exit codes: 0 match, 2 mismatch, 3 abstentions-only") {
    VerifyReport all_match;
    all_match.rows.push_back({"(1,inf)", 0, 0, "match", "", false, 0.5, 0.49, 0.01, "row"});
    CHECK(all_match.exit_code() == 0);

    VerifyReport with_mismatch = all_match;
    with_mismatch.rows.push_back({"(1,inf)", 1, 0, "mismatch", "", false, 1.5, 0.8, 0.01, "row"});
    CHECK(with_mismatch.exit_code() == 2);

    VerifyReport only_abstained;
    only_abstained.rows.push_back(
        {"(1,inf)", 0, 0, "abstained", "no decay expected", false, 0, 0, 0, ""});
    CHECK(only_abstained.exit_code() == 3);

    // abstained rows never count as mismatches
    VerifyReport mixed = all_match;
    mixed.rows.push_back({"(2,2)", 0, 0, "abstained", "norm not measured", false, 0, 0, 0, ""});
    CHECK(mixed.exit_code() == 0);
}

TEST_CASE("verify: anti-dissipative short-circuits with no-decay note") {
    JobConfig cfg;
    cfg.corpus_name = "negative_mass_wave_1d";  // unstable without a cutoff
    cfg.grid = FrequencyGrid::cartesian({{-4.0, 4.0, 512}});
    VerifyReport rep = verify(cfg);
    CHECK(rep.stability_failed);
    CHECK(rep.note.find("no decay expected") != std::string::npos);
    CHECK(rep.exit_code() == 3);
    for (const auto& r : rep.rows) CHECK(r.verdict == "abstained");
}

TEST_CASE("roots CSV export shape") {
    JobConfig cfg;
    cfg.corpus_name = "wave_1d";
    cfg.grid = FrequencyGrid::cartesian({{-1.0, 1.0, 32}});
    cfg.export_roots = true;
    AnalyzeResult res = analyze(cfg);
    REQUIRE_FALSE(res.roots_csv.empty());
    CHECK(res.roots_csv.rfind("node,xi0,k,re_tau,im_tau,abs_disc", 0) == 0);
    // 32 nodes x 2 labels + header
    int lines = 0;
    for (char ch : res.roots_csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 65);
}
