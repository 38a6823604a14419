#pragma once

#include <algorithm>
#include <cmath>

namespace monolayer {

// The four trainable filter parameters: scale index s, scaling factor f,
// center frequency omega, relative bandwidth sigma.
struct M6Params {
    double s = 1.0;
    double f = 1.0;
    double omega = 1.0;
    double sigma = 0.33;
};

inline M6Params m6_init() { return M6Params{1.0, 1.0, 1.0, 0.33}; }

// Keeps the radial filter well-defined: sigma away from 1 (log divides by
// ln(sigma)) and 0, f and omega positive, s bounded.
inline M6Params clamp_params(M6Params p) {
    p.sigma = std::clamp(p.sigma, 1e-3, 0.999);
    p.f = std::clamp(p.f, 1e-3, 1e3);
    p.omega = std::clamp(p.omega, 1e-3, 1e3);
    p.s = std::clamp(p.s, -4.0, 4.0);
    return p;
}

// Peak (center) frequency of the filter at scale s.
inline double omega_s(const M6Params& p) {
    return 1.0 / (p.omega * std::pow(p.f, p.s - 1.0));
}

// Radial log-Gabor profile; zero at r <= 0 (no DC response), peak 1 at
// r = omega_s.
inline double log_gabor_radial(double r, const M6Params& p) {
    if (r <= 0.0) return 0.0;
    const double ls = std::log(p.sigma);
    const double l = std::log(r / omega_s(p));
    return std::exp(-(l * l) / (2.0 * ls * ls));
}

}  // namespace monolayer
