#pragma once

// The monogenic feature layer: monogenic transform -> (phase, orientation,
// Riesz magnitude) -> per-map min-max normalization -> HSV color encoding ->
// two RGB maps (6 channels total).

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monolayer/image.hpp"
#include "monolayer/m6_params.hpp"
#include "monolayer/spectral.hpp"

namespace monolayer {

// Normalized intermediate maps, each in [0,1] (zeros if constant).
struct M6Maps {
    Image phi;    // local phase, normalized
    Image theta;  // local orientation, normalized
    Image ir;     // Riesz vector magnitude, normalized
};

struct M6Output {
    Image rgb_phi;    // H = phi, S = |I_R|, V = 1
    Image rgb_theta;  // H = theta, S = |I_R|, V = 1
};

inline M6Maps m6_maps_from_response(const MonogenicResponse& m) {
    M6Maps maps;
    maps.phi = normalize_minmax(local_phase(m));
    maps.theta = normalize_minmax(local_orientation(m));
    maps.ir = normalize_minmax(riesz_magnitude(m));
    return maps;
}

inline M6Output m6_encode_hsv(const M6Maps& maps) {
    const int h = maps.phi.height, w = maps.phi.width;
    M6Output out{Image(h, w, 3), Image(h, w, 3)};
    const std::size_t n = static_cast<std::size_t>(h) * w;
    for (std::size_t i = 0; i < n; ++i) {
        const double sat = maps.ir.data[i];
        const auto rgb_p = hsv_to_rgb(maps.phi.data[i], sat, 1.0);
        const auto rgb_t = hsv_to_rgb(maps.theta.data[i], sat, 1.0);
        for (int c = 0; c < 3; ++c) {
            out.rgb_phi.data[i * 3 + c] = rgb_p[c];
            out.rgb_theta.data[i * 3 + c] = rgb_t[c];
        }
    }
    return out;
}

// Multichannel input is reduced by channel mean before the transform.
inline Spectrum m6_input_spectrum(const Image& img) {
    return dft2(to_grayscale_mean(img));
}

inline M6Maps m6_maps_from_spectrum(const Spectrum& spec,
                                    const MonogenicKernels& kernels) {
    return m6_maps_from_response(apply_monogenic_kernels(spec, kernels));
}

inline M6Output m6_forward_from_spectrum(const Spectrum& spec,
                                         const MonogenicKernels& kernels) {
    return m6_encode_hsv(m6_maps_from_spectrum(spec, kernels));
}

inline M6Output m6_forward(const Image& img, const M6Params& params) {
    const Spectrum spec = m6_input_spectrum(img);
    const FrequencyGrid grid = make_frequency_grid(spec.height, spec.width);
    return m6_forward_from_spectrum(spec, make_monogenic_kernels(grid, params));
}

// Flattened 6-channel feature vector, pixel-major:
// [r_phi g_phi b_phi r_theta g_theta b_theta] per pixel.
inline std::vector<double> m6_features(const M6Output& out) {
    const std::size_t n = static_cast<std::size_t>(out.rgb_phi.height) *
                          out.rgb_phi.width;
    std::vector<double> feat(n * 6);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            feat[i * 6 + c] = out.rgb_phi.data[i * 3 + c];
            feat[i * 6 + 3 + c] = out.rgb_theta.data[i * 3 + c];
        }
    }
    return feat;
}

// Ablation encoding: the two normalized phase maps only, pixel-major
// [phi theta] pairs.
inline std::vector<double> m6_phase_features(const M6Maps& maps) {
    const std::size_t n = static_cast<std::size_t>(maps.phi.height) * maps.phi.width;
    std::vector<double> feat(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        feat[i * 2] = maps.phi.data[i];
        feat[i * 2 + 1] = maps.theta.data[i];
    }
    return feat;
}

// Central finite-difference gradient of a scalar loss of the M6 outputs with
// respect to the four filter parameters. Step h_i = max(1e-4*|p_i|, 1e-5).
// Order of the returned slots: s, f, omega, sigma.
inline std::array<double, 4> m6_param_grads(
    std::span<const Image> batch, const M6Params& params,
    const std::function<double(std::span<const M6Output>)>& loss_fn) {
    static constexpr const char* names[4] = {"s", "f", "omega", "sigma"};
    const auto eval = [&](const M6Params& p) {
        std::vector<M6Output> outs;
        outs.reserve(batch.size());
        for (const Image& img : batch) outs.push_back(m6_forward(img, p));
        return loss_fn(outs);
    };
    std::array<double, 4> grads{};
    for (int i = 0; i < 4; ++i) {
        const double* base =
            i == 0 ? &params.s : i == 1 ? &params.f : i == 2 ? &params.omega
                                                             : &params.sigma;
        const double h = std::max(1e-4 * std::abs(*base), 1e-5);
        M6Params plus = params, minus = params;
        double* pp = i == 0 ? &plus.s : i == 1 ? &plus.f : i == 2 ? &plus.omega
                                                                  : &plus.sigma;
        double* pm = i == 0 ? &minus.s : i == 1 ? &minus.f : i == 2 ? &minus.omega
                                                                    : &minus.sigma;
        *pp += h;
        *pm -= h;
        const double lp = eval(plus);
        if (!std::isfinite(lp))
            throw std::runtime_error(std::string("m6_param_grads: non-finite loss at ") +
                                     names[i] + " + h");
        const double lm = eval(minus);
        if (!std::isfinite(lm))
            throw std::runtime_error(std::string("m6_param_grads: non-finite loss at ") +
                                     names[i] + " - h");
        grads[i] = (lp - lm) / (2.0 * h);
    }
    return grads;
}

}  // namespace monolayer
