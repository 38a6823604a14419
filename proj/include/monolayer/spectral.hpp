#pragma once

// FFT-domain machinery: 2-D DFT wrappers (FFTW backend), the frequency grid,
// Riesz and log-Gabor transfer functions, and the monogenic transform.
//
// Conventions: unshifted grids (DC at index 0), frequencies in cycles/pixel
// in [-0.5, 0.5), forward transform unnormalized, inverse scaled by 1/(H*W).

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "monolayer/image.hpp"
#include "monolayer/m6_params.hpp"

namespace monolayer {

struct Spectrum {
    int height = 0;
    int width = 0;
    std::vector<std::complex<double>> data;  // row-major, size height*width

    Spectrum() = default;
    Spectrum(int h, int w)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w) {}
};

namespace detail {

// Process-wide FFTW plan cache. Planning is serialized (FFTW requires it);
// execution via fftw_execute_dft on caller buffers is thread-safe. Plans are
// created out-of-place with FFTW_ESTIMATE|FFTW_UNALIGNED on scratch buffers.
class FftwPlanCache {
public:
    static FftwPlanCache& instance() {
        static FftwPlanCache cache;
        return cache;
    }

    fftw_plan plan2d(int h, int w, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(h, w, sign);
        auto it = plans2d_.find(key);
        if (it != plans2d_.end()) return it->second;
        Scratch s(static_cast<std::size_t>(h) * w);
        fftw_plan p = fftw_plan_dft_2d(h, w, s.in, s.out, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans2d_[key] = p;
        return p;
    }

    fftw_plan plan1d(int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, sign);
        auto it = plans1d_.find(key);
        if (it != plans1d_.end()) return it->second;
        Scratch s(static_cast<std::size_t>(n));
        fftw_plan p =
            fftw_plan_dft_1d(n, s.in, s.out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans1d_[key] = p;
        return p;
    }

private:
    struct Scratch {
        fftw_complex* in;
        fftw_complex* out;
        explicit Scratch(std::size_t n) {
            in = fftw_alloc_complex(n);
            out = fftw_alloc_complex(n);
        }
        ~Scratch() {
            fftw_free(in);
            fftw_free(out);
        }
    };

    FftwPlanCache() = default;
    ~FftwPlanCache() {
        for (auto& [k, p] : plans2d_) fftw_destroy_plan(p);
        for (auto& [k, p] : plans1d_) fftw_destroy_plan(p);
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans2d_;
    std::map<std::pair<int, int>, fftw_plan> plans1d_;
};

inline void fft2_execute(const std::complex<double>* in, std::complex<double>* out,
                         int h, int w, int sign) {
    fftw_plan p = FftwPlanCache::instance().plan2d(h, w, sign);
    fftw_execute_dft(p,
                     reinterpret_cast<fftw_complex*>(
                         const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

inline void fft1_execute(const std::complex<double>* in, std::complex<double>* out,
                         int n, int sign) {
    fftw_plan p = FftwPlanCache::instance().plan1d(n, sign);
    fftw_execute_dft(p,
                     reinterpret_cast<fftw_complex*>(
                         const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

// Frequency of DFT bin k for length n, in cycles/pixel, in [-0.5, 0.5).
inline double fft_frequency(int k, int n) {
    return k < (n + 1) / 2 ? static_cast<double>(k) / n
                           : static_cast<double>(k - n) / n;
}

// Per-bin horizontal (u1) and vertical (u2) frequencies, flattened row-major.
struct FrequencyGrid {
    int height = 0;
    int width = 0;
    std::vector<double> u1, u2;
};

inline FrequencyGrid make_frequency_grid(int h, int w) {
    if (h < 1 || w < 1) throw std::invalid_argument("frequency grid: bad size");
    FrequencyGrid g;
    g.height = h;
    g.width = w;
    const std::size_t n = static_cast<std::size_t>(h) * w;
    g.u1.resize(n);
    g.u2.resize(n);
    for (int y = 0; y < h; ++y) {
        const double fy = fft_frequency(y, h);
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            g.u1[i] = fft_frequency(x, w);
            g.u2[i] = fy;
        }
    }
    return g;
}

inline Spectrum dft2(const Image& img) {
    if (img.channels != 1) throw std::invalid_argument("dft2: single-channel only");
    Spectrum spec(img.height, img.width);
    std::vector<std::complex<double>> in(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) in[i] = img.data[i];
    detail::fft2_execute(in.data(), spec.data.data(), img.height, img.width,
                         FFTW_FORWARD);
    return spec;
}

inline std::vector<std::complex<double>> idft2_complex(const Spectrum& spec) {
    std::vector<std::complex<double>> out(spec.data.size());
    detail::fft2_execute(spec.data.data(), out.data(), spec.height, spec.width,
                         FFTW_BACKWARD);
    const double scale = 1.0 / (static_cast<double>(spec.height) * spec.width);
    for (auto& v : out) v *= scale;
    return out;
}

// Real part of the scaled inverse transform.
inline Image idft2(const Spectrum& spec) {
    auto full = idft2_complex(spec);
    Image img(spec.height, spec.width, 1);
    for (std::size_t i = 0; i < full.size(); ++i) img.data[i] = full[i].real();
    return img;
}

// Riesz transfer functions H1 = u1/|u|, H2 = u2/|u|; zero at DC. Unit modulus
// H1^2 + H2^2 = 1 everywhere else.
struct RieszKernels {
    std::vector<double> h1, h2;
};

inline RieszKernels riesz_kernels(const FrequencyGrid& grid) {
    RieszKernels k;
    const std::size_t n = grid.u1.size();
    k.h1.resize(n);
    k.h2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::hypot(grid.u1[i], grid.u2[i]);
        if (r > 0.0) {
            k.h1[i] = grid.u1[i] / r;
            k.h2[i] = grid.u2[i] / r;
        }
    }
    return k;
}

// Isotropic log-Gabor transfer function over the grid; zero at DC.
inline std::vector<double> log_gabor(const FrequencyGrid& grid, const M6Params& params) {
    const M6Params p = clamp_params(params);
    std::vector<double> g(grid.u1.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = log_gabor_radial(std::hypot(grid.u1[i], grid.u2[i]), p);
    return g;
}

// Spectral multipliers of the monogenic transform. The Riesz parts carry the
// quadrature factor -i; they are zeroed on the self-conjugate lines (DC, and
// for even sizes the half-sampling column of riesz1 / row of riesz2, where
// the sign of the corresponding frequency is ambiguous) so that a real input
// yields exactly real outputs.
struct MonogenicKernels {
    int height = 0;
    int width = 0;
    std::vector<double> bandpass;                  // G
    std::vector<std::complex<double>> riesz1, riesz2;  // -i*H1*G, -i*H2*G
};

inline MonogenicKernels make_monogenic_kernels(const FrequencyGrid& grid,
                                               const M6Params& params) {
    MonogenicKernels k;
    k.height = grid.height;
    k.width = grid.width;
    k.bandpass = log_gabor(grid, params);
    const RieszKernels riesz = riesz_kernels(grid);
    const std::size_t n = k.bandpass.size();
    k.riesz1.resize(n);
    k.riesz2.resize(n);
    const int half_col = grid.width % 2 == 0 ? grid.width / 2 : -1;
    const int half_row = grid.height % 2 == 0 ? grid.height / 2 : -1;
    const std::complex<double> minus_i(0.0, -1.0);
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * grid.width + x;
            k.riesz1[i] = x == half_col ? 0.0 : minus_i * riesz.h1[i] * k.bandpass[i];
            k.riesz2[i] = y == half_row ? 0.0 : minus_i * riesz.h2[i] * k.bandpass[i];
        }
    }
    return k;
}

// Bandpassed even part I' and the two Riesz (odd) parts I1, I2.
struct MonogenicResponse {
    Image i_prime, i1, i2;
};

namespace detail {

inline Image real_part_checked(const Spectrum& spec, double scale_floor,
                               const char* what) {
    auto full = idft2_complex(spec);
    double residue = 0.0;
    for (const auto& v : full) residue = std::max(residue, std::abs(v.imag()));
    if (residue >= 1e-8 * scale_floor)
        throw std::runtime_error(std::string("monogenic transform: inverse of ") +
                                 what + " is not real (residue " +
                                 std::to_string(residue) + ")");
    Image img(spec.height, spec.width, 1);
    for (std::size_t i = 0; i < full.size(); ++i) img.data[i] = full[i].real();
    return img;
}

}  // namespace detail

inline MonogenicResponse apply_monogenic_kernels(const Spectrum& spec,
                                                 const MonogenicKernels& kernels) {
    if (spec.height != kernels.height || spec.width != kernels.width)
        throw std::invalid_argument("monogenic kernels: size mismatch");
    const std::size_t n = spec.data.size();
    double peak = 0.0;
    for (const auto& v : spec.data) peak = std::max(peak, std::abs(v));
    const double scale_floor =
        std::max(1.0, peak / (static_cast<double>(spec.height) * spec.width));

    Spectrum tmp(spec.height, spec.width);
    MonogenicResponse out;
    for (std::size_t i = 0; i < n; ++i) tmp.data[i] = spec.data[i] * kernels.bandpass[i];
    out.i_prime = detail::real_part_checked(tmp, scale_floor, "the bandpass part");
    for (std::size_t i = 0; i < n; ++i) tmp.data[i] = spec.data[i] * kernels.riesz1[i];
    out.i1 = detail::real_part_checked(tmp, scale_floor, "the first Riesz part");
    for (std::size_t i = 0; i < n; ++i) tmp.data[i] = spec.data[i] * kernels.riesz2[i];
    out.i2 = detail::real_part_checked(tmp, scale_floor, "the second Riesz part");
    return out;
}

inline MonogenicResponse monogenic_transform(const Image& img, const M6Params& params) {
    if (img.channels != 1)
        throw std::invalid_argument("monogenic_transform: single-channel only");
    const FrequencyGrid grid = make_frequency_grid(img.height, img.width);
    return apply_monogenic_kernels(dft2(img), make_monogenic_kernels(grid, params));
}

// Pointwise feature definitions.
inline double amplitude_of(double ip, double i1, double i2) {
    return std::sqrt(ip * ip + i1 * i1 + i2 * i2);
}

// Phase angle between the even part and the Riesz magnitude; 0 when both are
// zero (atan2(+-0, +0) is +-0).
inline double phase_of(double ip, double i1, double i2) {
    return std::atan2(ip, std::hypot(i1, i2));
}

// Orientation theta = atan(-i2/i1), folded to (-pi/2, pi/2); on the i1 = 0
// line it is sign(-i2)*pi/2, and 0 when both components vanish.
inline double orientation_of(double i1, double i2) {
    if (i1 == 0.0) {
        if (i2 == 0.0) return 0.0;
        return i2 < 0.0 ? 1.5707963267948966 : -1.5707963267948966;
    }
    return std::atan(-i2 / i1);
}

inline Image local_amplitude(const MonogenicResponse& m) {
    Image out(m.i_prime.height, m.i_prime.width, 1);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = amplitude_of(m.i_prime.data[i], m.i1.data[i], m.i2.data[i]);
    return out;
}

inline Image local_phase(const MonogenicResponse& m) {
    Image out(m.i_prime.height, m.i_prime.width, 1);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = phase_of(m.i_prime.data[i], m.i1.data[i], m.i2.data[i]);
    return out;
}

inline Image local_orientation(const MonogenicResponse& m) {
    Image out(m.i_prime.height, m.i_prime.width, 1);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = orientation_of(m.i1.data[i], m.i2.data[i]);
    return out;
}

// Magnitude of the Riesz vector, |I_R|.
inline Image riesz_magnitude(const MonogenicResponse& m) {
    Image out(m.i_prime.height, m.i_prime.width, 1);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::hypot(m.i1.data[i], m.i2.data[i]);
    return out;
}

// 1-D analytic signal: positive frequencies doubled, DC and (for even n) the
// half-sampling bin kept, negative frequencies zeroed.
inline std::vector<std::complex<double>> analytic_signal_1d(
    const std::vector<double>& f) {
    const int n = static_cast<int>(f.size());
    if (n < 4) throw std::invalid_argument("analytic_signal_1d: need at least 4 samples");
    std::vector<std::complex<double>> in(f.begin(), f.end()), spec(n), out(n);
    detail::fft1_execute(in.data(), spec.data(), n, FFTW_FORWARD);
    std::vector<std::complex<double>> weighted(n);
    weighted[0] = spec[0];
    for (int k = 1; k < (n + 1) / 2; ++k) weighted[k] = 2.0 * spec[k];
    if (n % 2 == 0) weighted[n / 2] = spec[n / 2];
    detail::fft1_execute(weighted.data(), out.data(), n, FFTW_BACKWARD);
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

}  // namespace monolayer
