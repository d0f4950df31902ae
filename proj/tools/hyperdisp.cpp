#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hyperdisp/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hyperdisp;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::uint64_t g_seed_override = 0;  // 0 = keep the config seed

JobConfig load_config(const std::string& path) {
    JobConfig cfg = JobConfig::from_file(path);
    if (g_seed_override != 0) {
        cfg.seed = g_seed_override;
        cfg.tol.seed = g_seed_override;
    }
    return cfg;
}

int cmd_analyze(const std::string& config, const std::string& outdir, bool strict) {
    JobConfig cfg = load_config(config);
    AnalyzeResult res = analyze(cfg);
    fs::create_directories(outdir);
    write_file(fs::path(outdir) / "report.json", res.to_json());
    write_file(fs::path(outdir) / "report.txt", res.to_text());
    if (!res.roots_csv.empty()) write_file(fs::path(outdir) / "roots.csv", res.roots_csv);
    std::cout << res.to_text();
    if (strict && res.any_abstention()) return 3;
    return 0;
}

int cmd_simulate(const std::string& config, const std::string& outdir) {
    JobConfig cfg = load_config(config);
    PropagatorRun run = simulate(cfg);
    fs::create_directories(outdir);
    write_file(fs::path(outdir) / "run.csv", run.to_csv());
    write_file(fs::path(outdir) / "run.json", run_sidecar_json(run, cfg));
    std::cout << "wrote " << run.entries.size() << " rows for " << run.times.size()
              << " times to " << outdir << "/run.csv\n";
    return 0;
}

int cmd_verify(const std::string& config, const std::string& outdir, bool strict) {
    JobConfig cfg = load_config(config);
    VerifyReport rep = verify(cfg);
    fs::create_directories(outdir);
    write_file(fs::path(outdir) / "verify.json", rep.to_json());
    write_file(fs::path(outdir) / "verify.txt", rep.to_text());
    std::cout << rep.to_text();
    return strict ? rep.exit_code() : 0;
}

int cmd_corpus(const std::string& show) {
    if (show.empty()) {
        for (const auto& name : corpus_names()) {
            CorpusEntry e = corpus_get(name);
            std::cout << name << "  (n=" << e.symbol.dim << ", m=" << e.symbol.order << ")  "
                      << e.provenance << "\n";
        }
        return 0;
    }
    CorpusEntry e = corpus_get(show);
    std::cout << "# " << show << ": " << e.provenance << "\n";
    std::cout << symbol_to_json(e.symbol) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperdisp: dispersive decay classification and verification for "
                 "constant-coefficient strictly hyperbolic operators"};
    app.require_subcommand(1);

    std::string config, outdir = "out", show;
    bool strict = false;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config, "job config file (JSON)")->required();
        sub->add_option("--out", outdir, "output directory");
        sub->add_flag("--strict", strict, "nonzero exit on abstentions/mismatches");
        sub->add_option("--seed", seed, "override the config seed (0 keeps the config value)");
    };

    CLI::App* an = app.add_subcommand("analyze", "classify roots and emit decay predictions");
    add_common(an, true);
    CLI::App* si = app.add_subcommand("simulate", "run the propagator and emit norm series");
    add_common(si, true);
    CLI::App* ve = app.add_subcommand("verify", "predictions vs fitted exponents");
    add_common(ve, true);
    CLI::App* co = app.add_subcommand("corpus", "list built-in symbols");
    co->add_option("--show", show, "print one symbol as JSON");

    CLI11_PARSE(app, argc, argv);
    g_seed_override = seed;

    try {
        if (an->parsed()) return cmd_analyze(config, outdir, strict);
        if (si->parsed()) return cmd_simulate(config, outdir);
        if (ve->parsed()) return cmd_verify(config, outdir, strict);
        if (co->parsed()) return cmd_corpus(show);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
