// monolayer CLI: monogenic feature transforms, contrast degradations, SSIM
// robustness reports, and the desk-scale training harness.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "monolayer/errors.hpp"
#include "monolayer/parallel.hpp"
#include "monolayer/version.hpp"
#include "cli_common.hpp"

namespace {

void add_threads_option(CLI::App& app) {
    app.add_option_function<int>(
           "--threads",
           [](const int& n) { monolayer::set_thread_count(n); },
           "Worker threads (1 = fully deterministic mode; 0 = auto)")
        ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monolayer: monogenic-layer feature transforms and analysis"};
    app.set_version_flag("--version", monolayer::version_string);
    app.require_subcommand(1);
    add_threads_option(app);

    auto transform_opts = std::make_shared<mlcli::TransformOpts>();
    CLI::App* transform =
        app.add_subcommand("transform", "Write M6 feature maps for one image");
    transform->add_option("input", transform_opts->input, "Input image (png/ppm/f64)")
        ->required();
    transform->add_option("--outdir", transform_opts->outdir, "Output directory")
        ->required();
    transform->add_option("--params", transform_opts->params,
                          "Filter parameters s,f,omega,sigma");
    transform->add_flag("--phases-only", transform_opts->phases_only,
                        "Write only the phase and orientation maps");
    transform->callback([transform_opts] { mlcli::run_transform(*transform_opts); });

    auto degrade_opts = std::make_shared<mlcli::DegradeOpts>();
    CLI::App* degrade =
        app.add_subcommand("degrade", "Apply a contrast degradation to a directory");
    degrade->add_option("input", degrade_opts->input_dir, "Input image directory")
        ->required();
    degrade->add_option("--outdir", degrade_opts->outdir, "Output directory")
        ->required();
    degrade->add_option("--kind", degrade_opts->kind, "scale | tf | haze")
        ->required();
    degrade->add_option("--level", degrade_opts->level, "d0 | d1 | d2 | d3")
        ->required();
    degrade->add_option("--seed", degrade_opts->seed, "Base RNG seed (haze)");
    degrade->callback([degrade_opts] { mlcli::run_degrade(*degrade_opts); });

    auto ssim_opts = std::make_shared<mlcli::SsimReportOpts>();
    CLI::App* ssim = app.add_subcommand(
        "ssim-report", "SSIM robustness of raw pixels vs M6 features");
    ssim->add_option("--mnist", ssim_opts->mnist_dir, "MNIST IDX directory");
    ssim->add_option("--out", ssim_opts->out_csv, "Output CSV path")->required();
    ssim->add_option("--summary", ssim_opts->summary_json, "Summary JSON path");
    ssim->add_option("--kind", ssim_opts->kind, "scale | tf | haze | all");
    ssim->add_option("--n", ssim_opts->count, "Number of sampled images")
        ->check(CLI::PositiveNumber);
    ssim->add_option("--seed", ssim_opts->seed, "Sampling seed");
    ssim->add_option("--params", ssim_opts->params,
                     "Filter parameters s,f,omega,sigma");
    ssim->callback([ssim_opts] { mlcli::run_ssim_report(*ssim_opts); });

    auto train_opts = std::make_shared<mlcli::ConfigCmdOpts>();
    CLI::App* train = app.add_subcommand("train", "Train one classifier");
    train->add_option("config", train_opts->config_path, "JSON config")->required();
    train->callback([train_opts] { mlcli::run_train(*train_opts); });

    auto grid_opts = std::make_shared<mlcli::ConfigCmdOpts>();
    CLI::App* grid = app.add_subcommand(
        "grid", "Train/test across all degradation levels of one kind");
    grid->add_option("config", grid_opts->config_path, "JSON config")->required();
    grid->callback([grid_opts] { mlcli::run_grid(*grid_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const mlcli::usage_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const monolayer::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
