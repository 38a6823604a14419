#pragma once

// Shared plumbing for the CLI: exit-code policy, strict config parsing, and
// dataset/degradation wiring. Exit codes: 0 success, 1 runtime failure,
// 2 usage or config error (including missing inputs).

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "monolayer/artifacts.hpp"
#include "monolayer/dataset.hpp"
#include "monolayer/degrade.hpp"
#include "monolayer/learn.hpp"

namespace mlcli {

using monolayer::Json;

struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void check_keys(const Json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw usage_error(where + " must be a JSON object");
    std::string unknown;
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) unknown += (unknown.empty() ? "" : ", ") + item.key();
    }
    if (!unknown.empty())
        throw usage_error("unknown key(s) in " + where + ": " + unknown);
}

template <typename T>
T get_field(const Json& j, const std::string& where, const std::string& key, T def) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw usage_error("bad value for " + where + "." + key);
    }
}

inline Json load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw usage_error("config file not found: " + path.string());
    try {
        return Json::parse(monolayer::read_text_file(path));
    } catch (const Json::parse_error& e) {
        throw usage_error("malformed config " + path.string() + ": " + e.what());
    }
}

struct DatasetConfig {
    std::string type = "mnist";
    std::string dir = "data/mnist";
    std::string labels_csv;
    bool desk_scale = true;
    monolayer::SplitCounts counts{};
    Json as_json;
};

inline DatasetConfig parse_dataset_config(const Json& j) {
    DatasetConfig cfg;
    cfg.as_json = j;
    check_keys(j, "dataset", {"type", "dir", "labels_csv", "desk_scale", "counts"});
    cfg.type = get_field<std::string>(j, "dataset", "type", "mnist");
    if (cfg.type != "mnist" && cfg.type != "image_dir")
        throw usage_error("dataset.type must be \"mnist\" or \"image_dir\"");
    cfg.dir = get_field<std::string>(j, "dataset", "dir", "data/mnist");
    cfg.labels_csv = get_field<std::string>(j, "dataset", "labels_csv", "");
    if (cfg.type == "image_dir" && cfg.labels_csv.empty())
        throw usage_error("dataset.labels_csv is required for image_dir datasets");
    cfg.desk_scale = get_field<bool>(j, "dataset", "desk_scale", true);
    if (j.contains("counts")) {
        const Json& c = j.at("counts");
        check_keys(c, "dataset.counts", {"train", "val", "test"});
        cfg.counts.train = get_field<std::size_t>(c, "dataset.counts", "train", 0);
        cfg.counts.val = get_field<std::size_t>(c, "dataset.counts", "val", 0);
        cfg.counts.test = get_field<std::size_t>(c, "dataset.counts", "test", 0);
    } else if (cfg.desk_scale) {
        cfg.counts = {2000, 500, 500};
    }
    return cfg;
}

inline monolayer::DataSplit load_split(const DatasetConfig& cfg, std::uint64_t seed) {
    if (cfg.type == "mnist")
        return monolayer::load_mnist_split(cfg.dir, seed, cfg.counts);
    return monolayer::split_dataset(monolayer::load_labeled_images(cfg.labels_csv),
                                    seed, cfg.counts);
}

struct DegradationConfig {
    std::string kind = "none";
    monolayer::DegradationLevel level = monolayer::DegradationLevel::d0;
    std::uint64_t seed = 0;
};

inline DegradationConfig parse_degradation_config(const Json& j,
                                                  const std::string& where) {
    DegradationConfig cfg;
    check_keys(j, where, {"kind", "level", "seed"});
    cfg.kind = get_field<std::string>(j, where, "kind", "none");
    if (cfg.kind != "none") monolayer::parse_degradation_kind(cfg.kind);  // validate
    try {
        cfg.level = monolayer::parse_degradation_level(
            get_field<std::string>(j, where, "level", "d0"));
    } catch (const std::invalid_argument& e) {
        throw usage_error(where + ".level: " + e.what());
    }
    cfg.seed = get_field<std::uint64_t>(j, where, "seed", 0);
    return cfg;
}

// Applies one degradation to every part with per-part derived streams
// ("train-d2", ...). Haze implies RGB replication across all parts.
inline void apply_degradation(monolayer::DataSplit& split,
                              const DegradationConfig& cfg) {
    using namespace monolayer;
    if (cfg.kind == "none") return;
    const DegradationKind kind = parse_degradation_kind(cfg.kind);
    if (kind == DegradationKind::Haze) {
        for (Dataset* part : {&split.train, &split.val, &split.test})
            for (Image& img : part->images) img = replicate_gray(img);
    }
    const char* parts[3] = {"train-", "val-", "test-"};
    Dataset* sets[3] = {&split.train, &split.val, &split.test};
    for (int i = 0; i < 3; ++i) {
        DegradationSpec spec{kind, cfg.level,
                             derive_seed(cfg.seed, parts[i] +
                                                       std::string(to_string(cfg.level)))};
        *sets[i] = degrade_dataset(*sets[i], spec);
    }
}

inline monolayer::ModelSpec parse_model_config(const Json& j) {
    using namespace monolayer;
    ModelSpec spec;
    check_keys(j, "model", {"top", "hidden", "classes", "feature_mode"});
    try {
        spec.top = parse_top_kind(get_field<std::string>(j, "model", "top", "m6"));
        spec.feature_mode = parse_feature_mode(
            get_field<std::string>(j, "model", "feature_mode", "hsv"));
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string("model: ") + e.what());
    }
    spec.hidden = get_field<int>(j, "model", "hidden", 64);
    spec.classes = get_field<int>(j, "model", "classes", 10);
    if (spec.hidden < 1 || spec.classes < 2)
        throw usage_error("model.hidden must be >= 1 and model.classes >= 2");
    return spec;
}

inline monolayer::TrainConfig parse_train_config(const Json& root) {
    using namespace monolayer;
    TrainConfig cfg;
    cfg.model = parse_model_config(root.value("model", Json::object()));
    const Json t = root.value("train", Json::object());
    check_keys(t, "train", {"lr", "epochs", "batch"});
    cfg.lr = get_field<double>(t, "train", "lr", 0.001);
    cfg.epochs = get_field<int>(t, "train", "epochs", 100);
    cfg.batch = get_field<int>(t, "train", "batch", 128);
    cfg.seed = get_field<std::uint64_t>(root, "config", "seed", 0);
    if (cfg.lr <= 0 || cfg.epochs < 0 || cfg.batch < 1)
        throw usage_error("train.lr/epochs/batch out of range");
    return cfg;
}

// Command option bags, filled by the CLI layer.

struct TransformOpts {
    std::string input;
    std::string outdir;
    std::string params;  // "s,f,omega,sigma" or empty
    bool phases_only = false;
};

struct DegradeOpts {
    std::string input_dir;
    std::string outdir;
    std::string kind = "scale";
    std::string level = "d1";
    std::uint64_t seed = 0;
};

struct SsimReportOpts {
    std::string mnist_dir = "data/mnist";
    std::string out_csv;
    std::string summary_json;
    std::string kind = "all";
    std::string params;
    int count = 1000;
    std::uint64_t seed = 0;
};

struct ConfigCmdOpts {
    std::string config_path;
};

void run_transform(const TransformOpts& opts);
void run_degrade(const DegradeOpts& opts);
void run_ssim_report(const SsimReportOpts& opts);
void run_train(const ConfigCmdOpts& opts);
void run_grid(const ConfigCmdOpts& opts);

inline monolayer::M6Params parse_params_arg(const std::string& s) {
    using namespace monolayer;
    if (s.empty()) return m6_init();
    M6Params p;
    double* slots[4] = {&p.s, &p.f, &p.omega, &p.sigma};
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok = comma == std::string::npos ? s.substr(pos)
                                                           : s.substr(pos, comma - pos);
        try {
            *slots[i] = std::stod(tok);
        } catch (const std::exception&) {
            throw usage_error("--params expects four comma-separated numbers");
        }
        if (i < 3) {
            if (comma == std::string::npos)
                throw usage_error("--params expects four comma-separated numbers");
            pos = comma + 1;
        } else if (comma != std::string::npos) {
            throw usage_error("--params expects four comma-separated numbers");
        }
    }
    return p;
}

}  // namespace mlcli
