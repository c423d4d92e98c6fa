// Copyright 2026 The constlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// constlab run | windows | score
//
// Exit codes: 0 success, 1 usage or I/O error, 2 invalid input,
// 3 training divergence.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "constlab/io.hpp"
#include "constlab/metrics.hpp"
#include "constlab/scenario.hpp"
#include "constlab/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitDivergence = 3;

void setup_logging() {
    auto logger = spdlog::stderr_color_st("constlab");
    logger->set_pattern("%l: %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char *env = std::getenv("CONSTLAB_LOG")) {
        const std::string v = env;
        if (v == "error" || v == "warn" || v == "info" || v == "debug") {
            spdlog::set_level(spdlog::level::from_str(v));
        } else {
            spdlog::warn("ignoring CONSTLAB_LOG={} (expected error, warn, info or debug)", v);
        }
    }
}

void report(const constlab::ScenarioError &e) {
    for (const auto &d : e.diagnostics()) {
        spdlog::error("{}", d.str());
    }
}

struct RunArgs {
    std::string scenario;
    double until = 0.0;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_run(const RunArgs &args) {
    constlab::Scenario sc;
    try {
        sc = constlab::load_scenario(args.scenario);
    } catch (const constlab::ScenarioError &e) {
        report(e);
        return kExitInvalid;
    }
    if (!(args.until >= 0.0) || args.until > sc.config.horizon) {
        spdlog::error("--until {} must lie in [0, simulation.horizon_s = {}]", args.until, sc.config.horizon);
        return kExitInvalid;
    }
    try {
        spdlog::info("scenario '{}': {} actors, horizon {} s", sc.name, sc.actors.size(), sc.config.horizon);
        auto sim = constlab::build_simulation(sc, args.seed);
        spdlog::debug("{} windows precomputed", sim.all_windows().size());
        if (sc.fedlearn && sc.fedlearn->plan.rounds > 0) {
            sim.start_rounds();
        }
        sim.advance_to(args.until);
        constlab::write_run_outputs(sim, args.out);
        spdlog::info("t={} s: {} events, {} rounds completed; outputs in {}", sim.now(), sim.event_log().size(),
                     sim.completed_rounds(), args.out);
        return kExitOk;
    } catch (const constlab::DivergenceError &e) {
        spdlog::error("training diverged: {}", e.what());
        return kExitDivergence;
    } catch (const std::invalid_argument &e) {
        spdlog::error("{}", e.what());
        return kExitInvalid;
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return kExitFailure;
    }
}

struct WindowArgs {
    std::string scenario;
    std::vector<std::string> pair;
    std::vector<double> span;
};

int cmd_windows(const WindowArgs &args) {
    constlab::Scenario sc;
    try {
        sc = constlab::load_scenario(args.scenario);
    } catch (const constlab::ScenarioError &e) {
        report(e);
        return kExitInvalid;
    }
    const constlab::Actor *ends[2] = {nullptr, nullptr};
    for (int k = 0; k < 2; ++k) {
        for (const auto &a : sc.actors) {
            if (a.name == args.pair[k]) {
                ends[k] = &a;
            }
        }
        if (!ends[k]) {
            spdlog::error("--pair: unknown actor '{}'", args.pair[k]);
            return kExitInvalid;
        }
    }
    if (ends[0] == ends[1] || (!ends[0]->is_spacecraft() && !ends[1]->is_spacecraft())) {
        spdlog::error("--pair {},{}: no visibility model for this pair", args.pair[0], args.pair[1]);
        return kExitInvalid;
    }
    if (!(args.span[1] > args.span[0])) {
        spdlog::error("--span: t1 must exceed t0");
        return kExitInvalid;
    }
    const auto ws = constlab::pair_windows(*ends[0], *ends[1], sc.config.body, args.span[0], args.span[1],
                                           sc.config.coarse_step);
    std::cout << constlab::render_windows_csv(ws, sc.actors);
    return kExitOk;
}

int cmd_score(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        spdlog::error("cannot open {}", path);
        return kExitInvalid;
    }
    try {
        const auto m = constlab::read_confusion_csv(in);
        const double kappa = constlab::cohens_kappa(m);
        std::printf("kappa=%.6f L=%.6f\n", kappa, 1.0 - kappa);
        return kExitOk;
    } catch (const constlab::MetricsError &e) {
        spdlog::error("{}: {}", path, e.what());
        return kExitInvalid;
    }
}

} // namespace

int main(int argc, char **argv) {
    setup_logging();
    CLI::App app{"Constellation operations and federated-learning simulator"};
    app.require_subcommand(1);

    RunArgs run;
    auto *run_cmd = app.add_subcommand("run", "Simulate a scenario and write its artifacts");
    run_cmd->add_option("--scenario", run.scenario, "Scenario TOML file")->required();
    run_cmd->add_option("--until", run.until, "Simulated time to stop at [s]")->required();
    run_cmd->add_option("--seed", run.seed, "Override meta.seed");
    run_cmd->add_option("--out", run.out, "Output directory")->required();

    WindowArgs win;
    auto *win_cmd = app.add_subcommand("windows", "Print the contact windows of one pair as CSV");
    win_cmd->add_option("--scenario", win.scenario, "Scenario TOML file")->required();
    win_cmd->add_option("--pair", win.pair, "Actor names A,B")->required()->delimiter(',')->expected(2);
    win_cmd->add_option("--span", win.span, "Interval t0,t1 [s]")->required()->delimiter(',')->expected(2);

    std::string matrix;
    auto *score_cmd = app.add_subcommand("score", "Print Cohen's kappa and the loss 1 - kappa");
    score_cmd->add_option("--matrix", matrix, "Confusion matrix CSV (rows true, columns predicted)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kExitOk : kExitFailure;
    }
    if (*run_cmd) {
        return cmd_run(run);
    }
    if (*win_cmd) {
        return cmd_windows(win);
    }
    return cmd_score(matrix);
}
