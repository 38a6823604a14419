#pragma once

// Contrast degradation procedures: interval rescaling ("scale"), fixed-factor
// contrast reduction about the mean ("tf"), and synthetic haze via a dark
// channel prior ("haze"). Level d0 is the identity for every kind.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "monolayer/image.hpp"
#include "monolayer/rng.hpp"

namespace monolayer {

enum class DegradationKind { Scale, TfContrast, Haze };
enum class DegradationLevel { d0 = 0, d1 = 1, d2 = 2, d3 = 3 };

inline const char* to_string(DegradationKind k) {
    switch (k) {
        case DegradationKind::Scale: return "scale";
        case DegradationKind::TfContrast: return "tf";
        case DegradationKind::Haze: return "haze";
    }
    return "?";
}

inline const char* to_string(DegradationLevel l) {
    static constexpr const char* names[4] = {"d0", "d1", "d2", "d3"};
    return names[static_cast<int>(l)];
}

inline DegradationKind parse_degradation_kind(const std::string& s) {
    if (s == "scale") return DegradationKind::Scale;
    if (s == "tf") return DegradationKind::TfContrast;
    if (s == "haze") return DegradationKind::Haze;
    throw std::invalid_argument("unknown degradation kind: " + s);
}

inline DegradationLevel parse_degradation_level(const std::string& s) {
    for (int i = 0; i < 4; ++i)
        if (s == to_string(static_cast<DegradationLevel>(i)))
            return static_cast<DegradationLevel>(i);
    throw std::invalid_argument("unknown degradation level: " + s);
}

struct DegradationSpec {
    DegradationKind kind = DegradationKind::Scale;
    DegradationLevel level = DegradationLevel::d0;
    std::uint64_t rng_seed = 0;  // used by haze only
};

// Preset parameters per (kind, level). Exactly one field group is meaningful
// for a given kind; identity is set for d0.
struct LevelParams {
    bool identity = false;
    double scale_a = 0.0, scale_b = 1.0;  // target interval for "scale"
    double tf_factor = 1.0;               // contrast factor for "tf"
    double t_lo = 0.0, t_hi = 1.0;        // transmission interval for "haze"
};

inline LevelParams level_params(DegradationKind kind, DegradationLevel level) {
    LevelParams p;
    if (level == DegradationLevel::d0) {
        p.identity = true;
        return p;
    }
    const int i = static_cast<int>(level) - 1;  // 0..2 for d1..d3
    switch (kind) {
        case DegradationKind::Scale: {
            static constexpr double a[3] = {0.3, 0.7, 0.9};
            p.scale_a = a[i];
            p.scale_b = 1.0;
            return p;
        }
        case DegradationKind::TfContrast: {
            static constexpr double f[3] = {0.7, 0.3, 0.1};
            p.tf_factor = f[i];
            return p;
        }
        case DegradationKind::Haze: {
            static constexpr double lo[3] = {0.5, 0.3, 0.0};
            static constexpr double hi[3] = {0.8, 0.5, 0.15};
            p.t_lo = lo[i];
            p.t_hi = hi[i];
            return p;
        }
    }
    throw std::invalid_argument("level_params: bad kind");
}

// Min-max rescale of all channels jointly into [a, b]; a constant image maps
// to the constant a.
inline Image degrade_scale(const Image& img, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("degrade_scale: need a < b");
    auto [lo, hi] = min_max(img);
    Image out(img.height, img.width, img.channels);
    if (hi > lo) {
        const double span = hi - lo;
        for (std::size_t i = 0; i < img.data.size(); ++i)
            out.data[i] = a + (img.data[i] - lo) * (b - a) / span;
    } else {
        std::fill(out.data.begin(), out.data.end(), a);
    }
    return out;
}

// Contrast reduction about the global mean, clamped to [0,1].
inline Image degrade_tf(const Image& img, double factor) {
    if (!(factor >= 0.0 && factor <= 1.0))
        throw std::invalid_argument("degrade_tf: factor must be in [0,1]");
    double mean = 0.0;
    for (double v : img.data) mean += v;
    mean /= static_cast<double>(img.data.size());
    Image out(img.height, img.width, img.channels);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = std::clamp(mean + factor * (img.data[i] - mean), 0.0, 1.0);
    return out;
}

// Dark channel: per-pixel min over channels, then a square min-filter of odd
// side `patch` with clamped borders.
inline Image dark_channel(const Image& img, int patch) {
    if (img.channels != 3) throw std::invalid_argument("dark_channel: need 3 channels");
    if (patch < 1 || patch % 2 == 0)
        throw std::invalid_argument("dark_channel: patch must be odd and >= 1");
    const int h = img.height, w = img.width, r = patch / 2;
    Image chan_min(h, w, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            chan_min.at(y, x) =
                std::min({img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)});
    // Separable min filter: rows then columns.
    Image rows(h, w, 1), out(h, w, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double m = chan_min.at(y, x);
            for (int dx = -r; dx <= r; ++dx)
                m = std::min(m, chan_min.at(y, std::clamp(x + dx, 0, w - 1)));
            rows.at(y, x) = m;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double m = rows.at(y, x);
            for (int dy = -r; dy <= r; ++dy)
                m = std::min(m, rows.at(std::clamp(y + dy, 0, h - 1), x));
            out.at(y, x) = m;
        }
    return out;
}

struct TransmissionMap {
    Image t;  // single channel, values in [0,1]
};

// Patch side used for the dark channel: 3 for small images (max side <= 64),
// 15 otherwise.
inline int haze_patch_side(const Image& img) {
    return std::max(img.height, img.width) <= 64 ? 3 : 15;
}

// t = 1 - 0.95 * dark_channel(I^c / A^c), clamped to [0,1].
inline TransmissionMap estimate_transmission(const Image& img,
                                             const std::array<double, 3>& atm,
                                             int patch) {
    if (img.channels != 3)
        throw std::invalid_argument("estimate_transmission: need 3 channels");
    for (double a : atm)
        if (!(a > 0.0 && a <= 1.0))
            throw std::invalid_argument("estimate_transmission: airlight must be in (0,1]");
    Image ratio(img.height, img.width, 3);
    for (std::size_t i = 0; i < ratio.data.size(); ++i)
        ratio.data[i] = img.data[i] / atm[i % 3];
    const Image dark = dark_channel(ratio, patch);
    TransmissionMap map{Image(img.height, img.width, 1)};
    for (std::size_t i = 0; i < dark.data.size(); ++i)
        map.t.data[i] = std::clamp(1.0 - 0.95 * dark.data[i], 0.0, 1.0);
    return map;
}

// Per-channel haze composition t*I + (1-t)*A, clamped to [0,1].
inline Image apply_haze(const Image& img, const TransmissionMap& tm,
                        const std::array<double, 3>& atm) {
    if (img.channels != 3) throw std::invalid_argument("apply_haze: need 3 channels");
    if (tm.t.height != img.height || tm.t.width != img.width)
        throw std::invalid_argument("apply_haze: transmission map size mismatch");
    Image out(img.height, img.width, 3);
    const std::size_t n = static_cast<std::size_t>(img.height) * img.width;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = tm.t.data[i];
        for (int c = 0; c < 3; ++c)
            out.data[i * 3 + c] =
                std::clamp(t * img.data[i * 3 + c] + (1.0 - t) * atm[c], 0.0, 1.0);
    }
    return out;
}

inline Image replicate_gray(const Image& img) {
    if (img.channels == 3) return img;
    Image out(img.height, img.width, 3);
    const std::size_t n = static_cast<std::size_t>(img.height) * img.width;
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) out.data[i * 3 + c] = img.data[i];
    return out;
}

// Draws the airlight color (r, g, b order) uniformly from [0.8, 1]^3.
inline std::array<double, 3> draw_airlight(Rng& rng) {
    std::array<double, 3> atm;
    for (double& a : atm) a = rng.uniform(0.8, 1.0);
    return atm;
}

// Full haze pipeline: grayscale inputs are replicated to RGB; the estimated
// transmission is rescaled into the level's [t_lo, t_hi] interval (a constant
// estimate maps to t_lo).
inline Image degrade_haze(const Image& img, DegradationLevel level,
                          std::uint64_t seed) {
    if (level == DegradationLevel::d0) return img;
    const LevelParams lp = level_params(DegradationKind::Haze, level);
    const Image rgb = replicate_gray(img);
    Rng rng(seed);
    const std::array<double, 3> atm = draw_airlight(rng);
    TransmissionMap tm = estimate_transmission(rgb, atm, haze_patch_side(rgb));
    tm.t = degrade_scale(tm.t, lp.t_lo, lp.t_hi);
    return apply_haze(rgb, tm, atm);
}

// Dispatcher; d0 returns a copy. Haze output has 3 channels, the other kinds
// preserve the input layout.
inline Image degrade_apply(const Image& img, const DegradationSpec& spec) {
    const LevelParams lp = level_params(spec.kind, spec.level);
    if (lp.identity) return img;
    switch (spec.kind) {
        case DegradationKind::Scale: return degrade_scale(img, lp.scale_a, lp.scale_b);
        case DegradationKind::TfContrast: return degrade_tf(img, lp.tf_factor);
        case DegradationKind::Haze: return degrade_haze(img, spec.level, spec.rng_seed);
    }
    throw std::invalid_argument("degrade_apply: bad kind");
}

// Batch helper: image i uses seed spec.rng_seed ^ i (haze only).
inline Image degrade_apply_indexed(const Image& img, const DegradationSpec& spec,
                                   std::size_t index) {
    DegradationSpec s = spec;
    s.rng_seed = spec.rng_seed ^ static_cast<std::uint64_t>(index);
    return degrade_apply(img, s);
}

}  // namespace monolayer
