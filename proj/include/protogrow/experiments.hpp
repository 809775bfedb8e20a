#pragma once

#include <map>
#include <string>

#include "protogrow/checks.hpp"
#include "protogrow/config.hpp"
#include "protogrow/free_energy.hpp"
#include "protogrow/synthetic.hpp"

namespace protogrow::harness {

struct CriterionFlag {
    std::string id;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct ExperimentReport {
    std::string name;
    RunConfig config;
    std::vector<std::pair<std::string, double>> metrics;  // insertion-ordered
    std::vector<CriterionFlag> criteria;
    std::vector<std::string> files;
    dyn::StepSizeReport validation;

    bool all_pass() const {
        for (const auto& c : criteria)
            if (!c.pass) return false;
        return true;
    }
    void metric(const std::string& k, double v) { metrics.emplace_back(k, v); }
};

RunConfig default_exp1_config();
RunConfig default_exp2_config();
RunConfig default_exp3_config();
RunConfig default_exp4_config();
RunConfig default_checks_config();

/// Spectral ordering and directional coverage.
ExperimentReport run_exp1(const RunConfig& cfg);
/// Temperature divergence and annealing-time ordering.
ExperimentReport run_exp2(const RunConfig& cfg);
/// Separation-force monotonicity across the grown hierarchy.
ExperimentReport run_exp3(const RunConfig& cfg);
/// Staged pruning safety.
ExperimentReport run_exp4(const RunConfig& cfg);
/// Aggregated property suites.
ExperimentReport run_checks(const RunConfig& cfg);

/// Writes events.csv / temps.csv / forces.csv / report.json under
/// cfg.out_dir and records the paths in the report.
void emit_outputs(ExperimentReport& report, const dyn::RunTrace& trace);
void emit_report_json(ExperimentReport& report);

}  // namespace protogrow::harness
