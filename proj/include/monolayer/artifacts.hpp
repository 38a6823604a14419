#pragma once

// Run artifacts: training history CSV, grid results (JSON + CSV), model
// checkpoints (JSON header + raw-f64 blobs), SSIM report tables, and run
// manifests. Numeric text output uses %.17g so round-trips are exact and
// reruns are byte-identical.

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "monolayer/errors.hpp"
#include "monolayer/image_io.hpp"
#include "monolayer/learn.hpp"
#include "monolayer/metrics.hpp"
#include "monolayer/rng.hpp"
#include "monolayer/version.hpp"

namespace monolayer {

using Json = nlohmann::json;

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::uint64_t config_hash(const Json& config) {
    return fnv1a64(config.dump());
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    out << text;
    if (!out) throw io_error("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return text;
}

// ---- training history ----

inline void save_history_csv(const std::filesystem::path& path,
                             const std::vector<EpochStats>& history) {
    std::string text = "epoch,loss,val_loss,accuracy,val_accuracy,s,f,omega,sigma\n";
    for (const EpochStats& e : history) {
        text += std::to_string(e.epoch) + "," + format_double(e.loss) + "," +
                format_double(e.val_loss) + "," + format_double(e.accuracy) + "," +
                format_double(e.val_accuracy);
        if (e.has_m6)
            text += "," + format_double(e.m6.s) + "," + format_double(e.m6.f) + "," +
                    format_double(e.m6.omega) + "," + format_double(e.m6.sigma);
        else
            text += ",,,,";
        text += "\n";
    }
    write_text_file(path, text);
}

// ---- checkpoints ----

inline void save_checkpoint(const std::filesystem::path& dir, const ModelState& st) {
    std::filesystem::create_directories(dir);
    Json header;
    header["format"] = "monolayer-checkpoint-v1";
    header["library_version"] = version_string;
    header["model"] = {{"top", to_string(st.spec.top)},
                       {"hidden", st.spec.hidden},
                       {"classes", st.spec.classes},
                       {"feature_mode", to_string(st.spec.feature_mode)}};
    header["input"] = {{"height", st.in_h}, {"width", st.in_w}, {"channels", st.in_c}};
    header["adam_t"] = st.adam_t;
    header["parameters"] = st.theta.size();
    write_text_file(dir / "header.json", header.dump(2) + "\n");
    const auto blob = [&](const std::vector<double>& v,
                          const std::filesystem::path& p) {
        Image img(static_cast<int>(v.size()), 1, 1);
        img.data = v;
        save_raw_f64(img, p);
    };
    blob(st.theta, dir / "theta.f64");
    blob(st.adam_m, dir / "adam_m.f64");
    blob(st.adam_v, dir / "adam_v.f64");
}

inline ModelState load_checkpoint(const std::filesystem::path& dir) {
    Json header;
    try {
        header = Json::parse(read_text_file(dir / "header.json"));
    } catch (const Json::parse_error& e) {
        throw format_error("bad checkpoint header in " + dir.string() + ": " +
                           e.what());
    }
    if (header.value("format", "") != "monolayer-checkpoint-v1")
        throw format_error("unrecognized checkpoint format in " + dir.string());
    ModelSpec spec;
    spec.top = parse_top_kind(header["model"]["top"].get<std::string>());
    spec.hidden = header["model"]["hidden"].get<int>();
    spec.classes = header["model"]["classes"].get<int>();
    spec.feature_mode =
        parse_feature_mode(header["model"]["feature_mode"].get<std::string>());
    const int h = header["input"]["height"].get<int>();
    const int w = header["input"]["width"].get<int>();
    const int c = header["input"]["channels"].get<int>();
    ModelState st = init_model(spec, h, w, c, 0);
    st.adam_t = header["adam_t"].get<std::int64_t>();
    const auto blob = [&](std::vector<double>& v, const std::filesystem::path& p) {
        const Image img = load_raw_f64(p);
        if (img.data.size() != st.layout.total)
            throw format_error("checkpoint blob size mismatch: " + p.string());
        v = img.data;
    };
    blob(st.theta, dir / "theta.f64");
    blob(st.adam_m, dir / "adam_m.f64");
    blob(st.adam_v, dir / "adam_v.f64");
    return st;
}

// ---- grid results ----

inline Json grid_to_json(const GridResult& grid) {
    Json j;
    j["kind"] = to_string(grid.kind);
    j["seed"] = grid.seed;
    j["degrade_seed"] = grid.degrade_seed;
    Json rows = Json::array();
    for (int i = 0; i < 4; ++i) {
        Json row = Json::array();
        for (int j2 = 0; j2 < 4; ++j2) row.push_back(grid.accuracy[i][j2]);
        rows.push_back(row);
    }
    j["accuracy"] = rows;
    j["levels"] = {"d0", "d1", "d2", "d3"};
    return j;
}

inline void save_grid_csv(const std::filesystem::path& path, const GridResult& grid) {
    std::string text = "train_level,test_d0,test_d1,test_d2,test_d3\n";
    for (int i = 0; i < 4; ++i) {
        text += std::string(to_string(static_cast<DegradationLevel>(i)));
        for (int j = 0; j < 4; ++j) text += "," + format_double(grid.accuracy[i][j]);
        text += "\n";
    }
    write_text_file(path, text);
}

// ---- SSIM robustness report ----

struct SsimReportRow {
    std::size_t image_index = 0;
    DegradationKind kind = DegradationKind::Scale;
    DegradationLevel level = DegradationLevel::d1;
    M6SsimComparison values;
};

inline void save_ssim_csv(const std::filesystem::path& path,
                          const std::vector<SsimReportRow>& rows) {
    std::string text = "image,kind,level,ssim_raw,ssim_phi,ssim_theta\n";
    for (const auto& r : rows) {
        text += std::to_string(r.image_index);
        text += std::string(",") + to_string(r.kind) + "," + to_string(r.level) + "," +
                format_double(r.values.raw) + "," + format_double(r.values.phi) + "," +
                format_double(r.values.theta) + "\n";
    }
    write_text_file(path, text);
}

// Five-number summary (min, Q1, median, Q3, max) with linear interpolation.
inline std::array<double, 5> quartiles(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("quartiles: empty input");
    std::sort(v.begin(), v.end());
    const auto at = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return v[lo] + (v[hi] - v[lo]) * frac;
    };
    return {at(0.0), at(0.25), at(0.5), at(0.75), at(1.0)};
}

// ---- run manifests ----

inline Json make_manifest(const std::string& command, const Json& config,
                          const std::vector<std::string>& inputs,
                          const std::vector<std::string>& outputs) {
    Json m;
    m["tool"] = "monolayer";
    m["version"] = version_string;
    m["command"] = command;
    m["config"] = config;
    m["config_hash"] = hash_hex(config_hash(config));
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    return m;
}

inline void write_manifest(const std::filesystem::path& path, Json manifest,
                           const std::string& started_at) {
    manifest["timestamps"] = {{"started", started_at},
                              {"finished", iso8601_utc_now()}};
    write_text_file(path, manifest.dump(2) + "\n");
}

}  // namespace monolayer
