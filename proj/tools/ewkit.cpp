#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ewkit/harness.hpp>
#include <ewkit/verify.hpp>

namespace {

// 0 ok, 1 bound violation, 2 bad config, 3 numeric failure.
constexpr int kOk = 0;
constexpr int kBoundViolation = 1;
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

int run_one(const ewkit::ExperimentConfig& cfg, bool print_summary) {
    int worst = kOk;
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        ewkit::ExperimentConfig c = cfg;
        c.seed = cfg.seed + rep;
        ewkit::RunResult r = ewkit::run_experiment(c);
        if (!c.out_dir.empty()) {
            std::string dir = c.out_dir;
            if (cfg.replicates > 1) dir += "/rep" + std::to_string(rep);
            ewkit::emit_outputs(r, c, dir);
        }
        if (print_summary) {
            std::printf(
                "algo=%s seed=%llu T=%d d=%d regret=%.6g bound=%.6g "
                "slack=%.6g %s\n",
                c.algorithm.c_str(),
                static_cast<unsigned long long>(c.seed), c.T, c.d,
                r.final_regret, r.final_bound,
                r.final_bound - r.final_regret,
                r.bound_violated ? "BOUND-VIOLATED" : "ok");
        }
        if (r.bound_violated) worst = kBoundViolation;
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ewkit: online learners as exponential-weights posteriors"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run one experiment from a config");
    std::string config_path, algo_override, out_override;
    std::uint64_t seed_override = 0;
    bool have_seed = false;
    run->add_option("--config", config_path, "flat key = value config file");
    run->add_option("--algo", algo_override, "override the algorithm id");
    run->add_option("--seed", seed_override, "override the seed")
        ->each([&](const std::string&) { have_seed = true; });
    run->add_option("--out", out_override, "output directory");

    // verify
    auto* verify = app.add_subcommand("verify", "run acceptance checks");
    std::string suite = "all";
    verify->add_option("--suite", suite, "all | core | adaptive | bandit");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "sweep one config parameter");
    std::string sweep_config, sweep_param, sweep_values;
    sweep->add_option("--config", sweep_config, "base config file");
    sweep->add_option("--param", sweep_param, "config key to sweep")
        ->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ewkit::ExperimentConfig cfg =
                config_path.empty()
                    ? ewkit::ExperimentConfig{}
                    : ewkit::ExperimentConfig::from_file(config_path);
            if (!algo_override.empty()) cfg.set("algorithm", algo_override);
            if (have_seed) cfg.seed = seed_override;
            if (!out_override.empty()) cfg.out_dir = out_override;
            return run_one(cfg, true);
        }
        if (verify->parsed()) {
            auto results = ewkit::verify_suite(suite);
            bool all_pass = true;
            for (const auto& r : results) {
                std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL",
                            r.name.c_str(), r.detail.c_str());
                all_pass = all_pass && r.pass;
            }
            return all_pass ? kOk : kBoundViolation;
        }
        if (sweep->parsed()) {
            ewkit::ExperimentConfig base =
                sweep_config.empty()
                    ? ewkit::ExperimentConfig{}
                    : ewkit::ExperimentConfig::from_file(sweep_config);
            int worst = kOk;
            for (const std::string& v : split_csv(sweep_values)) {
                ewkit::ExperimentConfig cfg = base;
                cfg.set(sweep_param, v);
                if (!cfg.out_dir.empty())
                    cfg.out_dir += "/" + sweep_param + "=" + v;
                std::printf("%s = %s:\n", sweep_param.c_str(), v.c_str());
                worst = std::max(worst, run_one(cfg, true));
            }
            return worst;
        }
    } catch (const ewkit::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ewkit::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericError;
    }
    return kOk;
}
