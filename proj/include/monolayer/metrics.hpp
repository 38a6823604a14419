#pragma once

// Structural similarity with a sliding uniform window (population statistics,
// borders clipped), plus the raw-vs-feature comparison used by the
// degradation robustness analysis.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "monolayer/degrade.hpp"
#include "monolayer/image.hpp"
#include "monolayer/m6.hpp"

namespace monolayer {

struct SsimOptions {
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
    int window = 7;  // odd side of the uniform window; <= 0 means one global window
};

struct SsimResult {
    double index = 0.0;  // mean of the map
    Image map;           // per-window similarity, same size as the inputs
};

namespace detail {

inline double ssim_term(double mx, double my, double vx, double vy, double cov,
                        double c1, double c2) {
    return ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
           ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace detail

inline SsimResult ssim(const Image& x, const Image& y, const SsimOptions& opt = {}) {
    if (!x.same_shape(y)) throw std::invalid_argument("ssim: shape mismatch");
    if (x.channels != 1) throw std::invalid_argument("ssim: single-channel only");
    const double c1 = (opt.k1 * opt.dynamic_range) * (opt.k1 * opt.dynamic_range);
    const double c2 = (opt.k2 * opt.dynamic_range) * (opt.k2 * opt.dynamic_range);
    const int h = x.height, w = x.width;
    SsimResult res;
    res.map = Image(h, w, 1);

    if (opt.window <= 0) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        const double n = static_cast<double>(x.data.size());
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            const double a = x.data[i], b = y.data[i];
            sx += a;
            sy += b;
            sxx += a * a;
            syy += b * b;
            sxy += a * b;
        }
        const double mx = sx / n, my = sy / n;
        const double vx = sxx / n - mx * mx, vy = syy / n - my * my;
        const double cov = sxy / n - mx * my;
        const double v = detail::ssim_term(mx, my, vx, vy, cov, c1, c2);
        std::fill(res.map.data.begin(), res.map.data.end(), v);
        res.index = v;
        return res;
    }

    if (opt.window % 2 == 0) throw std::invalid_argument("ssim: window must be odd");
    const int r = opt.window / 2;
    double total = 0.0;
    for (int cy = 0; cy < h; ++cy) {
        const int y0 = std::max(0, cy - r), y1 = std::min(h - 1, cy + r);
        for (int cx = 0; cx < w; ++cx) {
            const int x0 = std::max(0, cx - r), x1 = std::min(w - 1, cx + r);
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx) {
                    const double a = x.at(yy, xx), b = y.at(yy, xx);
                    sx += a;
                    sy += b;
                    sxx += a * a;
                    syy += b * b;
                    sxy += a * b;
                }
            const double n = static_cast<double>((y1 - y0 + 1) * (x1 - x0 + 1));
            const double mx = sx / n, my = sy / n;
            const double vx = sxx / n - mx * mx, vy = syy / n - my * my;
            const double cov = sxy / n - mx * my;
            const double v = detail::ssim_term(mx, my, vx, vy, cov, c1, c2);
            res.map.at(cy, cx) = v;
            total += v;
        }
    }
    res.index = total / (static_cast<double>(h) * w);
    return res;
}

// SSIM of a degraded image against the original, measured three ways: on the
// raw pixels and on each M6 color map (reduced to grayscale by channel mean).
struct M6SsimComparison {
    double raw = 0.0;
    double phi = 0.0;
    double theta = 0.0;
};

inline M6SsimComparison ssim_m6_comparison(const Image& img,
                                           const DegradationSpec& spec,
                                           const M6Params& params,
                                           const SsimOptions& opt = {}) {
    const Image degraded = degrade_apply(img, spec);
    const M6Output clean = m6_forward(img, params);
    const M6Output dirty = m6_forward(degraded, params);
    M6SsimComparison out;
    out.raw = ssim(to_grayscale_mean(img), to_grayscale_mean(degraded), opt).index;
    out.phi =
        ssim(to_grayscale_mean(clean.rgb_phi), to_grayscale_mean(dirty.rgb_phi), opt)
            .index;
    out.theta = ssim(to_grayscale_mean(clean.rgb_theta),
                     to_grayscale_mean(dirty.rgb_theta), opt)
                    .index;
    return out;
}

}  // namespace monolayer
