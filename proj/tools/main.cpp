#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "protogrow/experiments.hpp"

namespace {

using protogrow::harness::ExperimentReport;
using protogrow::harness::RunConfig;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::size_t seeds = 1;
};

RunConfig resolve_config(RunConfig base, const CliOptions& opt) {
    if (!opt.config_path.empty())
        base = protogrow::harness::load_config_file(opt.config_path, base);
    if (opt.has_seed) base.seed = opt.seed;
    if (!opt.out_dir.empty()) base.out_dir = opt.out_dir;
    return base;
}

int report_exit(const ExperimentReport& rep) {
    int failures = 0;
    for (const auto& c : rep.criteria) {
        std::printf("[%s] %-44s value=%.6g threshold=%.6g\n", c.pass ? "PASS" : "FAIL",
                    c.id.c_str(), c.value, c.threshold);
        if (!c.pass) {
            std::fprintf(stderr, "criterion failed: %s\n", c.id.c_str());
            ++failures;
        }
    }
    std::printf("%s: %s\n", rep.name.c_str(), failures == 0 ? "all criteria pass" : "FAILURES");
    return failures == 0 ? 0 : 1;
}

int run_fanout(const std::function<ExperimentReport(const RunConfig&)>& fn, RunConfig base,
               const CliOptions& opt) {
    if (opt.seeds <= 1) return report_exit(fn(base));

    std::vector<ExperimentReport> reports(opt.seeds);
    std::vector<std::thread> workers;
    const std::string root = base.out_dir;
    for (std::size_t i = 0; i < opt.seeds; ++i) {
        RunConfig cfg = base;
        cfg.seed = base.seed + i;
        cfg.out_dir = root + "/seed_" + std::to_string(cfg.seed);
        workers.emplace_back([fn, cfg, &reports, i] { reports[i] = fn(cfg); });
    }
    for (auto& w : workers) w.join();

    std::filesystem::create_directories(root);
    std::ofstream summary(root + "/summary.csv", std::ios::binary);
    summary << "seed,criterion,pass,value\n";
    int failures = 0;
    for (const auto& rep : reports)
        for (const auto& c : rep.criteria) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", c.value);
            summary << rep.config.seed << ',' << c.id << ',' << (c.pass ? 1 : 0) << ',' << buf
                    << '\n';
            if (!c.pass) {
                std::fprintf(stderr, "seed %llu criterion failed: %s\n",
                             static_cast<unsigned long long>(rep.config.seed), c.id.c_str());
                ++failures;
            }
        }
    std::printf("%zu seeds, %d failing criteria; summary at %s/summary.csv\n", opt.seeds,
                failures, root.c_str());
    return failures == 0 ? 0 : 1;
}

int run_gradcheck(const CliOptions& opt) {
    RunConfig cfg = resolve_config(protogrow::harness::default_checks_config(), opt);
    protogrow::la::Rng rng(cfg.seed);
    std::vector<protogrow::checks::PropertyResult> rows;
    rows.push_back(protogrow::checks::check_grad_prototypes_fd(100, rng));
    rows.push_back(protogrow::checks::check_grad_temperature_fd(100, rng));
    rows.push_back(protogrow::checks::check_first_variation_fd(100, rng));
    rows.push_back(protogrow::checks::check_second_variation_fd(100, rng));
    int failures = 0;
    for (const auto& r : rows) {
        std::printf("[%s] %-44s worst=%.3e tol=%.1e\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.worst, r.threshold);
        if (!r.pass) {
            std::fprintf(stderr, "criterion failed: gradcheck.%s\n", r.name.c_str());
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prototype-layer growth simulator"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "key = value config file");
        sub->add_option("--seed", opt.seed, "seed override")->each([&](const std::string&) {
            opt.has_seed = true;
        });
        sub->add_option("--out-dir", opt.out_dir, "output directory override");
        sub->add_option("--seeds", opt.seeds, "fan out this many consecutive seeds");
    };

    auto* exp1 = app.add_subcommand("exp1", "spectral ordering and directional coverage");
    auto* exp2 = app.add_subcommand("exp2", "temperature annealing order");
    auto* exp3 = app.add_subcommand("exp3", "separation-force monotonicity");
    auto* exp4 = app.add_subcommand("exp4", "staged pruning safety");
    auto* checks = app.add_subcommand("checks", "all property suites");
    auto* gradcheck = app.add_subcommand("gradcheck", "gradient checks only");
    for (auto* s : {exp1, exp2, exp3, exp4, checks, gradcheck}) add_common(s);

    CLI11_PARSE(app, argc, argv);

    try {
        if (exp1->parsed())
            return run_fanout(protogrow::harness::run_exp1,
                              resolve_config(protogrow::harness::default_exp1_config(), opt), opt);
        if (exp2->parsed())
            return run_fanout(protogrow::harness::run_exp2,
                              resolve_config(protogrow::harness::default_exp2_config(), opt), opt);
        if (exp3->parsed())
            return run_fanout(protogrow::harness::run_exp3,
                              resolve_config(protogrow::harness::default_exp3_config(), opt), opt);
        if (exp4->parsed())
            return run_fanout(protogrow::harness::run_exp4,
                              resolve_config(protogrow::harness::default_exp4_config(), opt), opt);
        if (checks->parsed())
            return report_exit(protogrow::harness::run_checks(
                resolve_config(protogrow::harness::default_checks_config(), opt)));
        if (gradcheck->parsed()) return run_gradcheck(opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
