#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rlrank/config.hpp"
#include "rlrank/fsio.hpp"
#include "rlrank/policies.hpp"
#include "rlrank/report.hpp"
#include "rlrank/tables.hpp"
#include "rlrank/trace.hpp"

namespace rlrank {

namespace fs = std::filesystem;

constexpr const char* kTraceSuffix = ".traces.jsonl";
constexpr const char* kReportSuffix = ".report.jsonl";

inline void write_traces_file(const TraceSet& traces, const fs::path& path) {
    std::ostringstream buf;
    write_traces(traces, buf);
    write_file_atomic(path, buf.str());
}

// All *.traces.jsonl / *.report.jsonl files under a root, any depth, sorted.
inline std::vector<fs::path> find_files(const fs::path& root, const std::string& suffix) {
    if (!fs::is_directory(root)) throw InputError("not a directory: " + root.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.size() >= suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// simulate: run the policy bench, write trace files

struct SimulateOutcome {
    std::vector<fs::path> trace_files;
    std::vector<fs::path> curve_files;
    std::vector<std::string> warnings;
    // label -> (train episodes, exploit episodes)
    std::map<std::string, std::pair<int, int>> episode_counts;
};

namespace detail {

inline std::string curves_csv(const VariantRun& run) {
    std::string out = "episode,run_name,tick";
    for (int c = 0; c < kCompartmentCount; ++c) {
        out += ',';
        out += compartment_name(static_cast<Compartment>(c));
    }
    out += '\n';
    for (std::size_t e = 0; e < run.tick_counts.size(); ++e) {
        const std::string& run_name = run.traces.episodes[e].run_name;
        for (std::size_t t = 0; t < run.tick_counts[e].size(); ++t) {
            out += std::to_string(e) + ',' + run_name + ',' + std::to_string(t);
            for (int c : run.tick_counts[e][t]) out += ',' + std::to_string(c);
            out += '\n';
        }
    }
    return out;
}

} // namespace detail

inline SimulateOutcome run_simulate(const ToolkitConfig& config, const std::string& experiment_name,
                                    const std::vector<std::string>& variant_filter,
                                    bool record_curves, const fs::path& out_root) {
    config.validate();
    const SimConfig& sim = config.experiment(experiment_name);

    std::vector<PolicyVariant> selected;
    if (variant_filter.empty()) {
        selected = config.variants;
    } else {
        for (const std::string& wanted : variant_filter) {
            auto it = std::find_if(config.variants.begin(), config.variants.end(),
                                   [&wanted](const PolicyVariant& v) { return v.label() == wanted; });
            if (it == config.variants.end()) {
                std::string msg = "unknown variant '" + wanted + "'; configured:";
                for (const PolicyVariant& v : config.variants) msg += " " + v.label();
                throw InputError(msg);
            }
            selected.push_back(*it);
        }
    }

    BenchOptions options;
    options.train_episodes = config.train_episodes;
    options.exploit_episodes = config.exploit_episodes;
    options.seed = config.seed;
    options.record_tick_counts = record_curves;

    SimulateOutcome outcome;
    for (const PolicyVariant& variant : selected) {
        VariantRun run = run_variant(sim, experiment_name, variant, config.binning, config.qlearn,
                                     options);
        fs::path trace_path = out_root / "traces" / experiment_name /
                              (variant.label() + kTraceSuffix);
        write_traces_file(run.traces, trace_path);
        outcome.trace_files.push_back(trace_path);
        outcome.episode_counts[variant.label()] = {options.train_episodes,
                                                   options.exploit_episodes};
        for (std::string& w : run.warnings) outcome.warnings.push_back(std::move(w));
        if (record_curves) {
            fs::path curve_path = out_root / "curves" / experiment_name /
                                  (variant.label() + ".curves.csv");
            write_file_atomic(curve_path, detail::curves_csv(run));
            outcome.curve_files.push_back(curve_path);
        }
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// analyze: trace files -> report files (mirrors the relative layout)

struct AnalyzeOutcome {
    std::vector<fs::path> report_files;
};

inline AnalyzeOutcome run_analyze(const ToolkitConfig& config, const fs::path& traces_root,
                                  const fs::path& out_root) {
    auto files = find_files(traces_root, kTraceSuffix);
    if (files.empty())
        throw InputError("no trace files (*" + std::string(kTraceSuffix) + ") under " +
                         traces_root.string());
    AnalysisParams params = config.analysis_params();
    AnalyzeOutcome outcome;
    for (const fs::path& file : files) {
        TraceSet traces = read_traces_file(file.string());
        AnalysisReport report = build_report(traces, params, config.cvar_alpha, config.iqr_windows);
        fs::path rel = fs::relative(file, traces_root);
        std::string name = rel.filename().string();
        name.resize(name.size() - std::string(kTraceSuffix).size());
        fs::path out_path = out_root / "reports" / rel.parent_path() / (name + kReportSuffix);
        write_report_file(report, out_path.string());
        outcome.report_files.push_back(out_path);
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// rank: report files -> per-experiment ranking tables

struct ExperimentRanking {
    MetricTable metrics;
    RankTable domain;
    bool with_reliability = false;
    std::map<std::string, ReliabilityScores> reliability;
    CombinedRankTable combined;
    std::vector<fs::path> files;
};

struct RankOutcome {
    std::map<std::string, ExperimentRanking> by_experiment;
};

inline RankOutcome run_rank(const fs::path& reports_root, bool with_reliability,
                            const fs::path& out_root) {
    auto files = find_files(reports_root, kReportSuffix);
    if (files.empty())
        throw InputError("no report files (*" + std::string(kReportSuffix) + ") under " +
                         reports_root.string());
    std::map<std::string, std::vector<AnalysisReport>> groups;
    for (const fs::path& file : files) {
        AnalysisReport rep = read_report_file(file.string());
        groups[rep.experiment_name].push_back(std::move(rep));
    }

    RankOutcome outcome;
    for (auto& [experiment, reports] : groups) {
        if (reports.size() < 2)
            throw InputError("experiment '" + experiment + "': ranking needs at least two " +
                             "algorithms, found " + std::to_string(reports.size()));
        ExperimentRanking ranking;
        for (const AnalysisReport& rep : reports) {
            if (ranking.metrics.count(rep.algorithm_name))
                throw InputError("experiment '" + experiment + "': duplicate algorithm '" +
                                 rep.algorithm_name + "'");
            ranking.metrics[rep.algorithm_name] = rep.metrics;
        }
        ranking.domain = build_rank_table(ranking.metrics);

        fs::path dir = out_root / "ranking" / experiment;
        fs::path csv = dir / "domain_ranking.csv";
        fs::path txt = dir / "domain_ranking.txt";
        write_file_atomic(csv, domain_table_csv(ranking.metrics, ranking.domain));
        write_file_atomic(txt, domain_table_text(ranking.metrics, ranking.domain));
        ranking.files = {csv, txt};

        if (with_reliability) {
            ranking.with_reliability = true;
            for (const AnalysisReport& rep : reports) {
                if (!rep.reliability_available)
                    throw InputError("experiment '" + experiment + "': algorithm '" +
                                     rep.algorithm_name + "' has no reliability scores: " +
                                     rep.reliability_error);
                ranking.reliability[rep.algorithm_name] = rep.reliability;
            }
            auto rel_ranks = rank_reliability(ranking.reliability);
            std::map<std::string, int> domain_aggregates;
            for (const auto& [name, row] : ranking.domain.rows)
                domain_aggregates[name] = row.aggregate;
            ranking.combined = combine_rankings(rel_ranks, domain_aggregates);
            fs::path ccsv = dir / "combined_ranking.csv";
            fs::path ctxt = dir / "combined_ranking.txt";
            write_file_atomic(ccsv, combined_table_csv(ranking.combined));
            write_file_atomic(ctxt, combined_table_text(ranking.combined));
            ranking.files.push_back(ccsv);
            ranking.files.push_back(ctxt);
        }
        outcome.by_experiment[experiment] = std::move(ranking);
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// report: ranking tables + reports -> human summary

struct ReportOutcome {
    fs::path markdown_file;
    std::vector<fs::path> summary_files;
};

inline ReportOutcome run_report(const fs::path& out_root) {
    fs::path reports_root = out_root / "reports";
    fs::path ranking_root = out_root / "ranking";
    if (!fs::is_directory(reports_root))
        throw InputError("no report directory under " + out_root.string() +
                         "; run analyze first");
    auto report_files = find_files(reports_root, kReportSuffix);
    if (report_files.empty())
        throw InputError("no report files under " + reports_root.string() +
                         "; run analyze first");
    if (!fs::is_directory(ranking_root))
        throw InputError("no ranking directory under " + out_root.string() + "; run rank first");

    std::map<std::string, std::vector<AnalysisReport>> groups;
    for (const fs::path& file : report_files) {
        AnalysisReport rep = read_report_file(file.string());
        groups[rep.experiment_name].push_back(std::move(rep));
    }

    ReportOutcome outcome;
    std::string md = "# Algorithm ranking report\n";
    for (auto& [experiment, reports] : groups) {
        std::sort(reports.begin(), reports.end(),
                  [](const AnalysisReport& a, const AnalysisReport& b) {
                      return a.algorithm_name < b.algorithm_name;
                  });
        md += "\n## Experiment: " + experiment + "\n";

        // Mean of the exploit-episode mean rewards: the headline score.
        std::vector<std::vector<std::string>> summary_rows{{"algorithm", "mean_of_mean_rewards"}};
        md += "\n| Algorithm | Mean of mean rewards |\n|---|---|\n";
        for (const AnalysisReport& rep : reports) {
            double value = mean(rep.exploit_curve);
            summary_rows.push_back({rep.algorithm_name, format_shortest(value)});
            md += "| " + rep.algorithm_name + " | " + format_fixed(value, 4) + " |\n";
        }
        fs::path summary_path = out_root / "summary" / (experiment + "_mean_rewards.csv");
        write_file_atomic(summary_path, detail::render_csv(summary_rows));
        outcome.summary_files.push_back(summary_path);

        fs::path domain_txt = ranking_root / experiment / "domain_ranking.txt";
        if (!fs::is_regular_file(domain_txt))
            throw InputError("missing " + domain_txt.string() + "; run rank first");
        md += "\n### Domain metrics ranking\n\n```\n" + read_file(domain_txt) + "```\n";

        fs::path combined_txt = ranking_root / experiment / "combined_ranking.txt";
        if (fs::is_regular_file(combined_txt))
            md += "\n### Combined ranking (reliability + domain)\n\n```\n" +
                  read_file(combined_txt) + "```\n";

        long long train_eps = 0, exploit_eps = 0;
        for (const AnalysisReport& rep : reports) {
            train_eps += static_cast<long long>(rep.train_curve.size());
            exploit_eps += static_cast<long long>(rep.exploit_curve.size());
        }
        md += "\nAnalyzed " + std::to_string(reports.size()) + " algorithms, " +
              std::to_string(train_eps) + " training and " + std::to_string(exploit_eps) +
              " exploitation episodes.\n";
    }
    outcome.markdown_file = out_root / "report.md";
    write_file_atomic(outcome.markdown_file, md);
    return outcome;
}

} // namespace rlrank
