#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace monolayer {

// Dense row-major image, interleaved channels, double precision.
// Pixel values are nominally in [0,1]; intermediates may leave that range.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<double> data;  // size = height*width*channels

    Image() = default;
    Image(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {
        if (h <= 0 || w <= 0 || (c != 1 && c != 3))
            throw std::invalid_argument("Image: bad shape");
    }

    std::size_t size() const { return data.size(); }

    double& at(int y, int x, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const Image& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline std::pair<double, double> min_max(const Image& img) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : img.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

inline double max_abs_diff(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

// Channel mean; single-channel input is returned unchanged (copy).
inline Image to_grayscale_mean(const Image& img) {
    if (img.channels == 1) return img;
    Image out(img.height, img.width, 1);
    const std::size_t n = static_cast<std::size_t>(img.height) * img.width;
    for (std::size_t i = 0; i < n; ++i) {
        const double* p = &img.data[i * 3];
        out.data[i] = (p[0] + p[1] + p[2]) / 3.0;
    }
    return out;
}

// Min-max rescale over all channels jointly; a constant image maps to zeros.
inline Image normalize_minmax(const Image& img) {
    auto [lo, hi] = min_max(img);
    Image out(img.height, img.width, img.channels);
    if (hi > lo) {
        const double span = hi - lo;
        for (std::size_t i = 0; i < img.data.size(); ++i)
            out.data[i] = (img.data[i] - lo) / span;
    }
    return out;
}

struct HsvTriple {
    double h = 0.0;  // hue, canonical range [0,1)
    double s = 0.0;  // saturation, [0,1]
    double v = 0.0;  // value, [0,1]
};

// Hexcone model. Hue wraps (h and h+1 agree); s=0 gives gray regardless of h.
inline std::array<double, 3> hsv_to_rgb(double h, double s, double v) {
    h -= std::floor(h);
    double hp = h * 6.0;
    int i = static_cast<int>(hp);
    if (i == 6) i = 5;  // h just below 1 with rounding
    const double f = hp - i;
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (i) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

inline std::array<double, 3> hsv_to_rgb(const HsvTriple& hsv) {
    return hsv_to_rgb(hsv.h, hsv.s, hsv.v);
}

}  // namespace monolayer
