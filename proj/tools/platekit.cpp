#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "platekit/config.hpp"
#include "platekit/errors.hpp"
#include "platekit/pipeline.hpp"

namespace {

// Exit codes: 1 unexpected, 2 config, 3 data, 4 validation.
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitValidation = 4;

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::string seed;
    int jobs = 0;
    std::string fold;
    std::string detections;
    std::string list;
    bool mock = false;
    bool set_mock = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file (key = value lines)");
    cmd->add_option("--out", flags.out, "Output root (overrides config)");
    cmd->add_option("--seed", flags.seed, "RNG seed (overrides config)");
    cmd->add_option("--jobs", flags.jobs, "Worker threads (overrides config)");
}

platekit::RunConfig build_config(const CommonFlags& flags) {
    platekit::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = platekit::load_config(flags.config_path);
    if (!flags.out.empty()) cfg.out = flags.out;
    if (!flags.seed.empty())
        platekit::apply_config_text(cfg, "seed = " + flags.seed, "--seed");
    if (flags.jobs > 0) cfg.jobs = flags.jobs;
    if (!flags.fold.empty())
        platekit::apply_config_text(cfg, "fold = " + flags.fold, "--fold");
    if (!flags.detections.empty()) cfg.detections = flags.detections;
    if (!flags.list.empty()) cfg.list = flags.list;
    if (flags.set_mock) cfg.mock = flags.mock;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"platekit: microscopy plate detection pipeline"};
    app.require_subcommand(1);

    using Runner = void (*)(const platekit::RunConfig&, std::ostream&);
    struct Sub {
        CLI::App* cmd = nullptr;
        CommonFlags flags;
        Runner run = nullptr;
    };
    std::vector<std::unique_ptr<Sub>> subs;

    auto add = [&](const char* name, const char* help, Runner run) -> Sub& {
        auto sub = std::make_unique<Sub>();
        sub->cmd = app.add_subcommand(name, help);
        sub->run = run;
        add_common(sub->cmd, sub->flags);
        subs.push_back(std::move(sub));
        return *subs.back();
    };

    add("merge", "Merge BF and GFP channels into RGB composites", platekit::run_merge);
    add("import-masks", "Convert instance masks into label files", platekit::run_import_masks);
    add("tile", "Cut composites into quadrants and remap labels", platekit::run_tile);
    Sub& build = add("build", "Write dataset bundle for one fold", platekit::run_build);
    build.cmd->add_option("--fold", build.flags.fold, "Test fold index (overrides config)");
    Sub& eval = add("eval", "Score a detection file against ground truth", platekit::run_eval);
    eval.cmd->add_option("--detections", eval.flags.detections, "Detection JSON path");
    eval.cmd->add_option("--list", eval.flags.list, "Ground-truth image list");
    Sub& crossval = add("crossval", "Evaluate all folds and average", platekit::run_crossval);
    crossval.cmd->add_flag("--mock", crossval.flags.mock, "Use the built-in mock detector");
    Sub& synth = add("synth", "Generate a synthetic dataset", platekit::run_synth);
    synth.cmd->add_flag("--mock", synth.flags.mock, "Write mock detections for --list");
    synth.cmd->add_option("--list", synth.flags.list, "Image list to mock-detect");

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& sub : subs) {
            if (!sub->cmd->parsed()) continue;
            if (const CLI::Option* mock = sub->cmd->get_option_no_throw("--mock"))
                sub->flags.set_mock = mock->count() > 0;
            const platekit::RunConfig cfg = build_config(sub->flags);
            sub->run(cfg, std::cout);
            return 0;
        }
    } catch (const platekit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const platekit::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const platekit::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
