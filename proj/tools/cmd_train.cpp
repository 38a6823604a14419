#include <filesystem>
#include <string>

#include "monolayer/artifacts.hpp"
#include "monolayer/learn.hpp"
#include "cli_common.hpp"

namespace mlcli {

namespace fs = std::filesystem;
using namespace monolayer;

void run_train(const ConfigCmdOpts& opts) {
    const std::string started = iso8601_utc_now();
    const Json config = load_config(opts.config_path);
    check_keys(config, "config",
               {"out_dir", "seed", "dataset", "model", "train", "degradation"});
    const std::string out_dir = get_field<std::string>(config, "config", "out_dir", "");
    if (out_dir.empty()) throw usage_error("config.out_dir is required");
    const TrainConfig train_cfg = parse_train_config(config);
    const DatasetConfig dataset_cfg =
        parse_dataset_config(config.value("dataset", Json::object()));
    const DegradationConfig degrade_cfg = parse_degradation_config(
        config.value("degradation", Json::object()), "degradation");

    DataSplit split = load_split(dataset_cfg, train_cfg.seed);
    apply_degradation(split, degrade_cfg);

    const TrainResult result = train(split, train_cfg);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    save_checkpoint(out / "checkpoint", result.state);
    save_history_csv(out / "history.csv", result.history);

    const EvalResult test = evaluate(result.state, split.test);
    Json summary;
    summary["test_loss"] = test.loss;
    summary["test_accuracy"] = test.accuracy;
    if (!result.history.empty()) {
        summary["final_train_loss"] = result.history.back().loss;
        summary["final_val_accuracy"] = result.history.back().val_accuracy;
    }
    if (result.state.spec.top == TopKind::M6) {
        const M6Params p = result.state.m6_params();
        summary["m6_params"] = {
            {"s", p.s}, {"f", p.f}, {"omega", p.omega}, {"sigma", p.sigma}};
    }
    write_text_file(out / "summary.json", summary.dump(2) + "\n");

    Json manifest = make_manifest("train", config, {opts.config_path},
                                  {"checkpoint", "history.csv", "summary.json"});
    write_manifest(out / "manifest.json", manifest, started);
    std::printf("train: test accuracy %.4f -> %s\n", test.accuracy, out_dir.c_str());
}

}  // namespace mlcli
