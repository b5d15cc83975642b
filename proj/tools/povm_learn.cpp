#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "povm/errors.hpp"
#include "povm/experiments.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCriterionMissed = 2;
constexpr int kConfigError = 3;

int report(const povm::ResultRecord& rec, const std::string& out, bool svg) {
    if (!out.empty()) povm::write_outputs(rec, out, svg);
    for (const auto& c : rec.criteria) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
    }
    std::cout << "record_hash " << rec.hash() << "  wall " << rec.wall_seconds << " s\n";
    return rec.all_passed() ? kOk : kCriterionMissed;
}

povm::ExperimentConfig load(const std::string& path, const std::string& experiment, std::optional<std::uint64_t> seed) {
    povm::Json j = povm::read_json_file(path);
    if (!j.is_object()) throw povm::ConfigError("config must be a JSON object");
    if (!experiment.empty()) {
        if (j.contains("experiment") && j.at("experiment") != experiment) {
            throw povm::ConfigError("config names experiment " + j.at("experiment").dump() + ", command line says " +
                                    experiment);
        }
        j["experiment"] = experiment;
    }
    if (seed) j["seed"] = *seed;
    auto config = povm::config_from_json(j);
    // Class and distribution files are relative to the config file.
    const auto base = std::filesystem::path(path).parent_path();
    for (std::string* f : {&config.class_file, &config.distribution_file}) {
        if (!f->empty() && std::filesystem::path(*f).is_relative()) *f = (base / *f).string();
    }
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"POVM hypothesis-class learning experiments"};
    app.require_subcommand(1);

    std::string experiment, config_path, out_dir, class_path;
    std::optional<std::uint64_t> seed;
    bool svg = false;

    auto* run = app.add_subcommand("run", "Run one experiment and write its outputs");
    run->add_option("experiment", experiment, "erm_failure | derm_success | finite_dim | unlearnable | bounds")
        ->required();
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--seed", seed, "Seed (overrides the config)");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--svg", svg, "Also write curves.svg");

    auto* validate = app.add_subcommand("validate", "Load and check a hypothesis-class file");
    validate->add_option("class-file", class_path, "Class JSON file")->required();

    auto* bounds = app.add_subcommand("bounds", "Evaluate the sample-complexity bounds");
    bounds->add_option("--config", config_path, "JSON config file")->required();
    bounds->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) {
            const auto config = load(config_path, experiment, seed);
            return report(povm::run_experiment(config), out_dir.empty() ? config.output_dir : out_dir, svg);
        }
        if (*validate) {
            const auto cls = povm::class_from_json(povm::read_json_file(class_path));
            std::cout << "ok: " << cls.variant_name() << " class, " << cls.size() << " members, dim "
                      << cls.domain().dim() << '\n';
            return kOk;
        }
        if (*bounds) {
            const auto config = load(config_path, "bounds", std::nullopt);
            const auto rec = povm::run_experiment(config);
            std::cout << rec.summary.at("bounds_csv").get<std::string>();
            return report(rec, out_dir.empty() ? config.output_dir : out_dir, false);
        }
    } catch (const povm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const povm::Error& e) {
        // Invalid class or distribution content is a configuration problem too.
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const povm::Json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}
