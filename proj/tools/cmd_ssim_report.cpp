#include <filesystem>
#include <string>
#include <vector>

#include "monolayer/artifacts.hpp"
#include "monolayer/dataset.hpp"
#include "monolayer/metrics.hpp"
#include "monolayer/parallel.hpp"
#include "cli_common.hpp"

namespace mlcli {

namespace fs = std::filesystem;
using namespace monolayer;

void run_ssim_report(const SsimReportOpts& opts) {
    const std::string started = iso8601_utc_now();
    const M6Params params = parse_params_arg(opts.params);
    std::vector<DegradationKind> kinds;
    if (opts.kind == "all") {
        kinds = {DegradationKind::Scale, DegradationKind::TfContrast,
                 DegradationKind::Haze};
    } else {
        try {
            kinds = {parse_degradation_kind(opts.kind)};
        } catch (const std::invalid_argument& e) {
            throw usage_error(e.what());
        }
    }
    if (opts.out_csv.empty()) throw usage_error("--out is required");

    const auto images = read_idx_images(
        [&] {
            const fs::path dir(opts.mnist_dir);
            if (!fs::is_directory(dir))
                throw usage_error("MNIST directory not found: " + opts.mnist_dir);
            const fs::path plain = dir / "train-images-idx3-ubyte";
            return fs::exists(plain) ? plain : dir / "train-images-idx3-ubyte.gz";
        }());
    if (static_cast<std::size_t>(opts.count) > images.size())
        throw usage_error("--n exceeds dataset size");

    std::vector<std::size_t> order(images.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng(derive_seed(opts.seed, "sample")).shuffle(order);
    order.resize(opts.count);

    std::vector<SsimReportRow> rows;
    for (DegradationKind kind : kinds) {
        for (int lvl = 1; lvl <= 3; ++lvl) {
            const auto level = static_cast<DegradationLevel>(lvl);
            const std::uint64_t base = derive_seed(
                opts.seed, std::string(to_string(kind)) + "-" + to_string(level));
            std::vector<SsimReportRow> batch(order.size());
            parallel_for(order.size(), [&](std::size_t i) {
                DegradationSpec spec{kind, level,
                                     base ^ static_cast<std::uint64_t>(i)};
                SsimReportRow row;
                row.image_index = order[i];
                row.kind = kind;
                row.level = level;
                row.values = ssim_m6_comparison(images[order[i]], spec, params);
                batch[i] = row;
            });
            rows.insert(rows.end(), batch.begin(), batch.end());
        }
    }

    if (const auto parent = fs::path(opts.out_csv).parent_path(); !parent.empty())
        fs::create_directories(parent);
    save_ssim_csv(opts.out_csv, rows);

    Json summary;
    for (DegradationKind kind : kinds) {
        for (int lvl = 1; lvl <= 3; ++lvl) {
            const auto level = static_cast<DegradationLevel>(lvl);
            std::vector<double> raw, phi, theta;
            for (const auto& r : rows)
                if (r.kind == kind && r.level == level) {
                    raw.push_back(r.values.raw);
                    phi.push_back(r.values.phi);
                    theta.push_back(r.values.theta);
                }
            Json cell;
            const auto pack = [](const std::array<double, 5>& q) {
                return Json{{"min", q[0]},
                            {"q1", q[1]},
                            {"median", q[2]},
                            {"q3", q[3]},
                            {"max", q[4]}};
            };
            cell["ssim_raw"] = pack(quartiles(raw));
            cell["ssim_phi"] = pack(quartiles(phi));
            cell["ssim_theta"] = pack(quartiles(theta));
            summary[to_string(kind)][to_string(level)] = cell;
        }
    }
    Json config;
    config["mnist"] = opts.mnist_dir;
    config["kind"] = opts.kind;
    config["n"] = opts.count;
    config["seed"] = opts.seed;
    config["params"] = {{"s", params.s},
                        {"f", params.f},
                        {"omega", params.omega},
                        {"sigma", params.sigma}};
    if (!opts.summary_json.empty()) {
        Json doc;
        doc["config"] = config;
        doc["summary"] = summary;
        write_text_file(opts.summary_json, doc.dump(2) + "\n");
    }
    std::printf("ssim-report: %zu rows -> %s\n", rows.size(), opts.out_csv.c_str());
}

}  // namespace mlcli
