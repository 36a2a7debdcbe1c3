// rlrank: simulate -> analyze -> rank -> report, end to end.
//
// Exit codes: 0 success, 2 for input/configuration problems the caller can
// fix, 1 for anything unexpected.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlrank/config.hpp"
#include "rlrank/pipeline.hpp"

namespace {

rlrank::ToolkitConfig load_config(const std::string& path) {
    if (path.empty()) return rlrank::ToolkitConfig::defaults();
    return rlrank::ToolkitConfig::load_file(path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank reinforcement-learning policy variants on an agent-based "
                 "epidemic control benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path,
                   "Toolkit configuration file (JSON); built-in defaults when omitted")
            ->envname("RLRANK_CONFIG");

    std::string out_dir = "out";
    app.add_option("--out", out_dir, "Workspace directory for all inputs and outputs")
            ->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Run the policy bench and record traces");
    std::string experiment = "Baseline";
    simulate->add_option("--experiment", experiment, "Experiment to simulate")
            ->capture_default_str();
    std::vector<std::string> variant_filter;
    simulate->add_option("--variants", variant_filter,
                         "Variant labels to run (comma separated; default: all configured)")
            ->delimiter(',');
    bool curves = false;
    simulate->add_flag("--curves", curves, "Also write per-tick compartment-count CSVs");

    auto* analyze = app.add_subcommand("analyze", "Turn trace files into analysis reports");
    std::string traces_dir;
    analyze->add_option("--traces", traces_dir,
                        "Directory scanned recursively for *.traces.jsonl (default: <out>/traces)");

    auto* rank = app.add_subcommand("rank", "Rank analyzed algorithms per experiment");
    std::string reports_dir;
    rank->add_option("--reports", reports_dir,
                     "Directory scanned recursively for *.report.jsonl (default: <out>/reports)");
    bool with_reliability = false;
    rank->add_flag("--with-reliability", with_reliability,
                   "Also produce the combined reliability + domain ranking");

    app.add_subcommand("report", "Write a human-readable summary of the ranking workspace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) {
            rlrank::ToolkitConfig config = load_config(config_path);
            auto outcome = rlrank::run_simulate(config, experiment, variant_filter, curves, out_dir);
            for (const auto& [label, counts] : outcome.episode_counts)
                std::cout << label << ": " << counts.first << " train + " << counts.second
                          << " exploit episodes\n";
            for (const auto& path : outcome.trace_files) std::cout << "wrote " << path.string() << "\n";
            for (const auto& path : outcome.curve_files) std::cout << "wrote " << path.string() << "\n";
            if (!outcome.warnings.empty()) {
                std::cout << outcome.warnings.size() << " warnings:\n";
                for (const auto& w : outcome.warnings) std::cout << "  " << w << "\n";
            }
        } else if (analyze->parsed()) {
            rlrank::ToolkitConfig config = load_config(config_path);
            std::string in_dir = traces_dir.empty() ? out_dir + "/traces" : traces_dir;
            auto outcome = rlrank::run_analyze(config, in_dir, out_dir);
            for (const auto& path : outcome.report_files)
                std::cout << "wrote " << path.string() << "\n";
        } else if (rank->parsed()) {
            std::string in_dir = reports_dir.empty() ? out_dir + "/reports" : reports_dir;
            auto outcome = rlrank::run_rank(in_dir, with_reliability, out_dir);
            for (const auto& [exp_name, ranking] : outcome.by_experiment) {
                std::cout << exp_name << ":\n";
                for (const auto& path : ranking.files) std::cout << "  wrote " << path.string() << "\n";
            }
        } else {
            auto outcome = rlrank::run_report(out_dir);
            std::cout << "wrote " << outcome.markdown_file.string() << "\n";
            for (const auto& path : outcome.summary_files)
                std::cout << "wrote " << path.string() << "\n";
        }
    } catch (const rlrank::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
