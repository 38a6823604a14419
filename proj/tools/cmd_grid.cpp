#include <filesystem>
#include <string>
#include <vector>

#include "monolayer/artifacts.hpp"
#include "monolayer/learn.hpp"
#include "cli_common.hpp"

namespace mlcli {

namespace fs = std::filesystem;
using namespace monolayer;

void run_grid(const ConfigCmdOpts& opts) {
    const std::string started = iso8601_utc_now();
    const Json config = load_config(opts.config_path);
    check_keys(config, "config",
               {"out_dir", "seed", "dataset", "model", "train", "grid"});
    const std::string out_dir = get_field<std::string>(config, "config", "out_dir", "");
    if (out_dir.empty()) throw usage_error("config.out_dir is required");
    if (!config.contains("grid")) throw usage_error("config.grid is required");
    const Json& gj = config.at("grid");
    check_keys(gj, "grid", {"kind", "seed"});
    GridConfig grid_cfg;
    grid_cfg.train = parse_train_config(config);
    try {
        grid_cfg.kind = parse_degradation_kind(
            get_field<std::string>(gj, "grid", "kind", "scale"));
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string("grid.kind: ") + e.what());
    }
    grid_cfg.degrade_seed = get_field<std::uint64_t>(gj, "grid", "seed", 0);
    const DatasetConfig dataset_cfg =
        parse_dataset_config(config.value("dataset", Json::object()));

    const DataSplit split = load_split(dataset_cfg, grid_cfg.train.seed);
    const GridResult grid = run_grid(split, grid_cfg);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    Json result = grid_to_json(grid);
    result["config_hash"] = hash_hex(config_hash(config));
    write_text_file(out / "grid_result.json", result.dump(2) + "\n");
    save_grid_csv(out / "grid_matrix.csv", grid);
    std::vector<std::string> outputs = {"grid_result.json", "grid_matrix.csv"};
    for (int i = 0; i < 4; ++i) {
        const std::string name =
            std::string("history_train_") +
            to_string(static_cast<DegradationLevel>(i)) + ".csv";
        save_history_csv(out / name, grid.histories[i]);
        outputs.push_back(name);
    }
    Json manifest = make_manifest("grid", config, {opts.config_path}, outputs);
    write_manifest(out / "manifest.json", manifest, started);
    std::printf("grid: %s diagonal %.4f %.4f %.4f %.4f -> %s\n",
                to_string(grid.kind), grid.accuracy[0][0], grid.accuracy[1][1],
                grid.accuracy[2][2], grid.accuracy[3][3], out_dir.c_str());
}

}  // namespace mlcli
