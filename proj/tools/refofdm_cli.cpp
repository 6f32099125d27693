/**
 * @file refofdm_cli.cpp
 * @brief Command-line front end: design-filter, run, psd, ber, theory, complexity.
 *
 * Exit codes: 0 success, 1 validation failure, 2 runtime failure.
 */
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "refofdm/harness.hpp"

namespace {

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c, bool config_required)
{
    auto* opt = sub->add_option("--config", c.config, "scenario JSON file");
    if (config_required)
        opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "output directory (overrides the scenario's outputs)");
    sub->add_option("--seed", c.seed, "single seed replacing the scenario's seed list");
}

refofdm::ScenarioSpec load(const Common& c)
{
    refofdm::ScenarioSpec spec = refofdm::parse_scenario(c.config);
    if (c.seed)
        spec.seeds = {*c.seed};
    if (!c.out.empty())
        spec.outputs = c.out;
    return spec;
}

int run_parts(const Common& c, unsigned parts, const std::string& command)
{
    const refofdm::ScenarioSpec spec = load(c);
    const refofdm::RunReport rep = refofdm::run_experiment(spec, parts);
    const auto files = refofdm::emit_reports(rep, spec.outputs, command);
    int failed = 0;
    for (const auto& u : rep.users)
        if (!u.error.empty()) {
            std::cerr << "user '" << u.name << "' failed: " << u.error << "\n";
            ++failed;
        }
    for (const auto& t : rep.theory)
        if (!t.converged)
            std::cerr << "warning: " << t.warning << "\n";
    std::cout << "wrote " << files.size() << " files to " << spec.outputs << "\n";
    return failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ref-OFDM LDACS physical-layer simulator"};
    app.require_subcommand(1);
    Common design, run, psd, ber, theory, cx;
    auto* s_design = app.add_subcommand("design-filter", "export prototype, realized filters and frame layouts");
    add_common(s_design, design, false);
    auto* s_run = app.add_subcommand("run", "full experiment: PSD, interference, BER, theory, complexity");
    add_common(s_run, run, true);
    auto* s_psd = app.add_subcommand("psd", "composite PSD and interference-at-DME table");
    add_common(s_psd, psd, true);
    auto* s_ber = app.add_subcommand("ber", "Monte-Carlo BER per user");
    add_common(s_ber, ber, true);
    auto* s_theory = app.add_subcommand("theory", "closed-form BER per user");
    add_common(s_theory, theory, true);
    auto* s_cx = app.add_subcommand("complexity", "real-multiplication counts");
    add_common(s_cx, cx, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    using refofdm::RunParts;
    try {
        if (*s_design) {
            std::string out = design.out;
            if (out.empty() && !design.config.empty())
                out = refofdm::parse_scenario(design.config).outputs;
            if (out.empty())
                out = "out";
            const auto files = refofdm::emit_filter_designs(out);
            std::cout << "wrote " << files.size() << " files to " << out << "\n";
            return 0;
        }
        if (*s_run)
            return run_parts(run, unsigned(RunParts::All), "run");
        if (*s_psd)
            return run_parts(psd, unsigned(RunParts::Psd), "psd");
        if (*s_ber)
            return run_parts(ber, unsigned(RunParts::Ber), "ber");
        if (*s_theory)
            return run_parts(theory, unsigned(RunParts::Theory), "theory");
        if (*s_cx)
            return run_parts(cx, unsigned(RunParts::Complexity), "complexity");
    } catch (const refofdm::ScenarioError& e) {
        for (const auto& m : e.errors())
            std::cerr << "error: " << m << "\n";
        return 1;
    } catch (const refofdm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
