#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "monolayer/artifacts.hpp"
#include "monolayer/degrade.hpp"
#include "monolayer/image_io.hpp"
#include "cli_common.hpp"

namespace mlcli {

namespace fs = std::filesystem;
using namespace monolayer;

void run_degrade(const DegradeOpts& opts) {
    const std::string started = iso8601_utc_now();
    DegradationKind kind;
    DegradationLevel level;
    try {
        kind = parse_degradation_kind(opts.kind);
        level = parse_degradation_level(opts.level);
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    if (!fs::is_directory(opts.input_dir))
        throw usage_error("input directory not found: " + opts.input_dir);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(opts.input_dir)) {
        if (!entry.is_regular_file()) continue;
        try {
            detect_format(entry.path());
        } catch (const unsupported_error&) {
            continue;
        }
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw usage_error("no images found in " + opts.input_dir);

    fs::create_directories(opts.outdir);
    const fs::path out(opts.outdir);
    Json entries = Json::array();
    std::vector<std::string> inputs, outputs;
    const DegradationSpec spec{kind, level, opts.seed};

    for (std::size_t i = 0; i < files.size(); ++i) {
        const fs::path dst = out / files[i].filename();
        Json entry;
        entry["file"] = files[i].filename().string();
        if (level == DegradationLevel::d0) {
            fs::copy_file(files[i], dst, fs::copy_options::overwrite_existing);
        } else {
            const Image img = load_image(files[i]);
            const Image degraded = degrade_apply_indexed(img, spec, i);
            save_image(degraded, dst);
            if (kind == DegradationKind::Haze) {
                const std::uint64_t image_seed =
                    opts.seed ^ static_cast<std::uint64_t>(i);
                Rng rng(image_seed);
                const auto atm = draw_airlight(rng);
                entry["seed"] = image_seed;
                entry["airlight"] = {atm[0], atm[1], atm[2]};
            }
        }
        inputs.push_back(files[i].string());
        outputs.push_back(dst.filename().string());
        entries.push_back(entry);
    }

    Json config;
    config["kind"] = opts.kind;
    config["level"] = opts.level;
    config["seed"] = opts.seed;
    config["input_dir"] = opts.input_dir;
    Json manifest = make_manifest("degrade", config, inputs, outputs);
    manifest["images"] = entries;
    write_manifest(out / "manifest.json", manifest, started);
    std::printf("degrade: %s %s, %zu images -> %s\n", opts.kind.c_str(),
                opts.level.c_str(), files.size(), opts.outdir.c_str());
}

}  // namespace mlcli
