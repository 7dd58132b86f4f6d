#include "tarlev/io/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct Overrides {
    std::string model;
    std::string target;
    std::string threshold;
    std::string bekk;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> len;
    std::optional<std::size_t> burn_in;
    std::optional<std::size_t> n;
    std::vector<std::string> set;
};

// `key=value`; value parsed as JSON when it is valid JSON, else kept as a string.
json parse_setting(const std::string& kv, std::string& key) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw tarlev::Error(tarlev::ErrorCode::Configuration, "--set expects key=value, got '" + kv + "'");
    key = kv.substr(0, eq);
    const auto value = kv.substr(eq + 1);
    const auto parsed = json::parse(value, nullptr, false);
    return parsed.is_discarded() ? json(value) : parsed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold autoregressive models, leverage analysis and asymmetric BEKK comparison"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    app.add_option("--config", config_path, "Experiment config JSON")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Random seed (u64)");
    app.add_option("--out", out_dir, "Output directory");

    Overrides ov;
    const std::map<std::string, std::string> descriptions{
        {"simulate", "Monte Carlo moment study of a TAR model"},
        {"moments", "Unconditional and conditional moments of a TAR model"},
        {"fit-tar", "Nonlinearity test, structure identification and Gibbs estimation"},
        {"fit-bekk", "Maximum likelihood VAR-asymmetric BEKK estimation and news impact surface"},
        {"nic", "News impact curve and volatility-minimizing return of a TAR model"},
        {"validate", "Pseudo-residual diagnostics of a TAR model on data"},
        {"compare", "TAR versus BEKK moment comparison"},
    };
    for (const auto& name : tarlev::io::kPipelines) {
        auto* sub = app.add_subcommand(std::string(name), descriptions.at(std::string(name)));
        sub->add_option("--model", ov.model, "Preset name, model JSON path");
        sub->add_option("--target", ov.target, "Target price CSV (date,price)");
        sub->add_option("--threshold", ov.threshold, "Threshold-variable price CSV (date,price)");
        sub->add_option("--set", ov.set, "Pipeline option key=value (repeatable)");
        if (name == "simulate") {
            sub->add_option("--reps", ov.reps, "Replications");
            sub->add_option("--len", ov.len, "Path length");
        }
        if (name == "simulate" || name == "fit-tar" || name == "validate" || name == "fit-bekk")
            sub->add_option("--burn-in", ov.burn_in, "Discarded initial simulation steps");
        if (name != "simulate" && name != "moments" && name != "nic")
            sub->add_option("--n", ov.n, "Simulated sample size when no data is given");
        if (name == "compare") sub->add_option("--bekk", ov.bekk, "BEKK preset name or parameter JSON path");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            cfg = json::parse(tarlev::io::read_file(config_path), nullptr, false);
            if (cfg.is_discarded() || !cfg.is_object())
                throw tarlev::Error(tarlev::ErrorCode::Configuration, "config is not a JSON object");
        }
        const auto* sub = app.get_subcommands().front();
        if (cfg.contains("pipeline") && cfg["pipeline"] != sub->get_name())
            throw tarlev::Error(tarlev::ErrorCode::Configuration, "config pipeline '" + cfg["pipeline"].get<std::string>() +
                                                                     "' conflicts with subcommand '" + sub->get_name() + "'");
        cfg["pipeline"] = sub->get_name();
        if (!ov.model.empty()) cfg["model"] = ov.model;
        if (!ov.target.empty()) cfg["inputs"]["target"] = ov.target;
        if (!ov.threshold.empty()) cfg["inputs"]["threshold"] = ov.threshold;
        if (seed) cfg["seed"] = *seed;
        if (!out_dir.empty()) cfg["output_dir"] = out_dir;
        if (!cfg.contains("options")) cfg["options"] = json::object();
        auto& opts = cfg["options"];
        if (ov.reps) opts["reps"] = *ov.reps;
        if (ov.len) opts["len"] = *ov.len;
        if (ov.burn_in) opts["burn_in"] = *ov.burn_in;
        if (ov.n) opts["n"] = *ov.n;
        if (!ov.bekk.empty()) opts["bekk"] = ov.bekk;
        for (const auto& kv : ov.set) {
            std::string key;
            auto value = parse_setting(kv, key);
            opts[key] = std::move(value);
        }

        const auto manifest = tarlev::io::run_experiment(tarlev::io::ExperimentConfig::from_json(cfg));
        std::cout << manifest.dump(2) << '\n';
        return 0;
    } catch (const tarlev::Error& e) {
        std::cerr << "error [" << tarlev::to_string(e.code()) << "]: " << e.what() << '\n';
        return e.is_configuration() ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
