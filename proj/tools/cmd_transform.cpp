#include <filesystem>
#include <string>
#include <vector>

#include "monolayer/artifacts.hpp"
#include "monolayer/image_io.hpp"
#include "monolayer/m6.hpp"
#include "cli_common.hpp"

namespace mlcli {

namespace fs = std::filesystem;
using namespace monolayer;

void run_transform(const TransformOpts& opts) {
    const std::string started = iso8601_utc_now();
    const M6Params params = parse_params_arg(opts.params);
    if (!fs::exists(opts.input))
        throw usage_error("input not found: " + opts.input);
    const Image input = load_image(opts.input);

    const Image gray = to_grayscale_mean(input);
    const MonogenicResponse resp = monogenic_transform(gray, params);
    const M6Maps maps = m6_maps_from_response(resp);
    const M6Output encoded = m6_encode_hsv(maps);

    fs::create_directories(opts.outdir);
    const fs::path out(opts.outdir);
    std::vector<std::string> outputs;
    const auto dump = [&](const Image& raw, const Image& display,
                          const std::string& name) {
        save_raw_f64(raw, out / (name + ".f64"));
        save_png(display, out / (name + ".png"));
        outputs.push_back(name + ".f64");
        outputs.push_back(name + ".png");
    };

    if (!opts.phases_only) {
        dump(resp.i_prime, normalize_minmax(resp.i_prime), "i_prime");
        dump(local_amplitude(resp), normalize_minmax(local_amplitude(resp)),
             "amplitude");
    }
    dump(local_phase(resp), maps.phi, "phase");
    dump(local_orientation(resp), maps.theta, "orientation");
    if (!opts.phases_only) {
        dump(encoded.rgb_phi, encoded.rgb_phi, "rgb_phi");
        dump(encoded.rgb_theta, encoded.rgb_theta, "rgb_theta");
    }

    Json config;
    config["input"] = opts.input;
    config["params"] = {{"s", params.s},
                        {"f", params.f},
                        {"omega", params.omega},
                        {"sigma", params.sigma}};
    config["phases_only"] = opts.phases_only;
    Json manifest = make_manifest("transform", config, {opts.input}, outputs);
    write_manifest(out / "manifest.json", manifest, started);
    std::printf("transform: wrote %zu files to %s\n", outputs.size() + 1,
                opts.outdir.c_str());
}

}  // namespace mlcli
