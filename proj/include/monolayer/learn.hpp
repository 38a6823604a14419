#pragma once

// Desk-scale classifier harness: a trainable feature front (the M6 layer with
// its four filter parameters, or a 3x3/6-filter conv layer) under a shared
// dense head (hidden ReLU layer + softmax), trained with Adam on mean
// cross-entropy. All randomness flows from named streams of the config seed,
// and every reduction has a fixed order, so runs are bit-reproducible for a
// fixed thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monolayer/dataset.hpp"
#include "monolayer/m6.hpp"
#include "monolayer/parallel.hpp"
#include "monolayer/rng.hpp"

namespace monolayer {

enum class TopKind { M6, Conv };
enum class FeatureMode { Hsv6, Phases2 };

inline const char* to_string(TopKind k) { return k == TopKind::M6 ? "m6" : "conv"; }
inline const char* to_string(FeatureMode m) {
    return m == FeatureMode::Hsv6 ? "hsv" : "phases";
}

inline TopKind parse_top_kind(const std::string& s) {
    if (s == "m6") return TopKind::M6;
    if (s == "conv") return TopKind::Conv;
    throw std::invalid_argument("unknown model top: " + s);
}

inline FeatureMode parse_feature_mode(const std::string& s) {
    if (s == "hsv") return FeatureMode::Hsv6;
    if (s == "phases") return FeatureMode::Phases2;
    throw std::invalid_argument("unknown feature mode: " + s);
}

struct ModelSpec {
    TopKind top = TopKind::M6;
    int hidden = 64;
    int classes = 10;
    FeatureMode feature_mode = FeatureMode::Hsv6;
};

inline constexpr int conv_filters = 6;
inline constexpr int conv_kernel = 3;

// Offsets into the flat parameter vector. The M6 slots order is
// (s, f, omega, sigma); conv weights are [ky][kx][cin][cout].
struct ParamLayout {
    std::size_t m6_off = 0, m6_len = 0;
    std::size_t conv_w_off = 0, conv_w_len = 0;
    std::size_t conv_b_off = 0, conv_b_len = 0;
    std::size_t w1_off = 0, w1_len = 0;
    std::size_t b1_off = 0, b1_len = 0;
    std::size_t w2_off = 0, w2_len = 0;
    std::size_t b2_off = 0, b2_len = 0;
    std::size_t total = 0;
    int feature_len = 0;
};

inline ParamLayout make_layout(const ModelSpec& spec, int h, int w, int c) {
    ParamLayout l;
    std::size_t off = 0;
    if (spec.top == TopKind::M6) {
        const int per_pixel = spec.feature_mode == FeatureMode::Hsv6 ? 6 : 2;
        l.feature_len = h * w * per_pixel;
        l.m6_off = off;
        l.m6_len = 4;
        off += 4;
    } else {
        l.feature_len = h * w * conv_filters;
        l.conv_w_off = off;
        l.conv_w_len = static_cast<std::size_t>(conv_kernel) * conv_kernel * c *
                       conv_filters;
        off += l.conv_w_len;
        l.conv_b_off = off;
        l.conv_b_len = conv_filters;
        off += l.conv_b_len;
    }
    l.w1_off = off;
    l.w1_len = static_cast<std::size_t>(l.feature_len) * spec.hidden;
    off += l.w1_len;
    l.b1_off = off;
    l.b1_len = spec.hidden;
    off += l.b1_len;
    l.w2_off = off;
    l.w2_len = static_cast<std::size_t>(spec.hidden) * spec.classes;
    off += l.w2_len;
    l.b2_off = off;
    l.b2_len = spec.classes;
    off += l.b2_len;
    l.total = off;
    return l;
}

struct ModelState {
    ModelSpec spec;
    int in_h = 0, in_w = 0, in_c = 0;
    ParamLayout layout;
    std::vector<double> theta;
    std::vector<double> adam_m, adam_v;
    std::int64_t adam_t = 0;

    M6Params m6_params() const {
        const double* p = theta.data() + layout.m6_off;
        return M6Params{p[0], p[1], p[2], p[3]};
    }
    void set_m6_params(const M6Params& p) {
        double* q = theta.data() + layout.m6_off;
        q[0] = p.s;
        q[1] = p.f;
        q[2] = p.omega;
        q[3] = p.sigma;
    }
};

// Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases, M6
// slots at the canonical init. Draw order: conv weights, then w1, then w2.
inline ModelState init_model(const ModelSpec& spec, int h, int w, int c,
                             std::uint64_t seed) {
    if (c != 1 && c != 3) throw std::invalid_argument("init_model: channels");
    ModelState st;
    st.spec = spec;
    st.in_h = h;
    st.in_w = w;
    st.in_c = c;
    st.layout = make_layout(spec, h, w, c);
    st.theta.assign(st.layout.total, 0.0);
    st.adam_m.assign(st.layout.total, 0.0);
    st.adam_v.assign(st.layout.total, 0.0);
    Rng rng(derive_seed(seed, "init"));
    const auto glorot = [&](std::size_t off, std::size_t len, double fan_in,
                            double fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (std::size_t i = 0; i < len; ++i)
            st.theta[off + i] = rng.uniform(-limit, limit);
    };
    if (spec.top == TopKind::M6) {
        st.set_m6_params(m6_init());
    } else {
        glorot(st.layout.conv_w_off, st.layout.conv_w_len,
               static_cast<double>(conv_kernel) * conv_kernel * c,
               static_cast<double>(conv_kernel) * conv_kernel * conv_filters);
    }
    glorot(st.layout.w1_off, st.layout.w1_len, st.layout.feature_len, spec.hidden);
    glorot(st.layout.w2_off, st.layout.w2_len, spec.hidden, spec.classes);
    return st;
}

struct ForwardCache {
    std::vector<double> x;         // flattened features
    std::vector<double> conv_pre;  // conv pre-activation (Conv top)
    std::vector<double> h_pre, h_act, probs;
};

namespace detail {

// Zero-padded 3x3 convolution, stride 1, ReLU; features pixel-major with
// interleaved output channels.
inline void conv_forward(const ModelState& st, const Image& img,
                         std::vector<double>& pre, std::vector<double>& feat) {
    const int h = st.in_h, w = st.in_w, c = st.in_c;
    const double* cw = st.theta.data() + st.layout.conv_w_off;
    const double* cb = st.theta.data() + st.layout.conv_b_off;
    pre.assign(static_cast<std::size_t>(h) * w * conv_filters, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double* out = &pre[(static_cast<std::size_t>(y) * w + x) * conv_filters];
            for (int co = 0; co < conv_filters; ++co) out[co] = cb[co];
            for (int ky = 0; ky < conv_kernel; ++ky) {
                const int yy = y + ky - 1;
                if (yy < 0 || yy >= h) continue;
                for (int kx = 0; kx < conv_kernel; ++kx) {
                    const int xx = x + kx - 1;
                    if (xx < 0 || xx >= w) continue;
                    for (int ci = 0; ci < c; ++ci) {
                        const double v = img.at(yy, xx, ci);
                        const double* wrow =
                            cw + ((static_cast<std::size_t>(ky) * conv_kernel + kx) * c +
                                  ci) *
                                     conv_filters;
                        for (int co = 0; co < conv_filters; ++co)
                            out[co] += v * wrow[co];
                    }
                }
            }
        }
    feat.resize(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) feat[i] = std::max(0.0, pre[i]);
}

inline void conv_backward(const ModelState& st, const Image& img,
                          const std::vector<double>& pre,
                          const std::vector<double>& dfeat, double* grad) {
    const int h = st.in_h, w = st.in_w, c = st.in_c;
    double* gw = grad + st.layout.conv_w_off;
    double* gb = grad + st.layout.conv_b_off;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t base = (static_cast<std::size_t>(y) * w + x) * conv_filters;
            double dpre[conv_filters];
            bool any = false;
            for (int co = 0; co < conv_filters; ++co) {
                dpre[co] = pre[base + co] > 0.0 ? dfeat[base + co] : 0.0;
                any = any || dpre[co] != 0.0;
                gb[co] += dpre[co];
            }
            if (!any) continue;
            for (int ky = 0; ky < conv_kernel; ++ky) {
                const int yy = y + ky - 1;
                if (yy < 0 || yy >= h) continue;
                for (int kx = 0; kx < conv_kernel; ++kx) {
                    const int xx = x + kx - 1;
                    if (xx < 0 || xx >= w) continue;
                    for (int ci = 0; ci < c; ++ci) {
                        const double v = img.at(yy, xx, ci);
                        double* wrow =
                            gw + ((static_cast<std::size_t>(ky) * conv_kernel + kx) * c +
                                  ci) *
                                     conv_filters;
                        for (int co = 0; co < conv_filters; ++co)
                            wrow[co] += v * dpre[co];
                    }
                }
            }
        }
}

inline void head_forward(const ModelState& st, const std::vector<double>& x,
                         ForwardCache& cache) {
    const int hidden = st.spec.hidden, classes = st.spec.classes;
    const double* w1 = st.theta.data() + st.layout.w1_off;
    const double* b1 = st.theta.data() + st.layout.b1_off;
    const double* w2 = st.theta.data() + st.layout.w2_off;
    const double* b2 = st.theta.data() + st.layout.b2_off;
    cache.h_pre.assign(b1, b1 + hidden);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* row = w1 + i * hidden;
        double* hp = cache.h_pre.data();
        for (int j = 0; j < hidden; ++j) hp[j] += xi * row[j];
    }
    cache.h_act.resize(hidden);
    for (int j = 0; j < hidden; ++j) cache.h_act[j] = std::max(0.0, cache.h_pre[j]);
    std::vector<double> logits(b2, b2 + classes);
    for (int j = 0; j < hidden; ++j) {
        const double hj = cache.h_act[j];
        if (hj == 0.0) continue;
        const double* row = w2 + static_cast<std::size_t>(j) * classes;
        for (int k = 0; k < classes; ++k) logits[k] += hj * row[k];
    }
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double denom = 0.0;
    cache.probs.resize(classes);
    for (int k = 0; k < classes; ++k) {
        cache.probs[k] = std::exp(logits[k] - mx);
        denom += cache.probs[k];
    }
    for (int k = 0; k < classes; ++k) cache.probs[k] /= denom;
}

inline double sample_loss(const ForwardCache& cache, int label) {
    return -std::log(std::max(cache.probs[label], 1e-300));
}

// Accumulates head gradients for one sample into grad (sum over samples;
// divide by the batch size afterwards). Optionally returns dL/dx.
inline void head_backward(const ModelState& st, const ForwardCache& cache,
                          int label, double* grad, std::vector<double>* dx) {
    const int hidden = st.spec.hidden, classes = st.spec.classes;
    const double* w1 = st.theta.data() + st.layout.w1_off;
    const double* w2 = st.theta.data() + st.layout.w2_off;
    double* gw1 = grad + st.layout.w1_off;
    double* gb1 = grad + st.layout.b1_off;
    double* gw2 = grad + st.layout.w2_off;
    double* gb2 = grad + st.layout.b2_off;

    std::vector<double> dlogits(cache.probs);
    dlogits[label] -= 1.0;
    for (int k = 0; k < classes; ++k) gb2[k] += dlogits[k];
    std::vector<double> dh(hidden, 0.0);
    for (int j = 0; j < hidden; ++j) {
        const double hj = cache.h_act[j];
        const double* row = w2 + static_cast<std::size_t>(j) * classes;
        double* grow = gw2 + static_cast<std::size_t>(j) * classes;
        double acc = 0.0;
        for (int k = 0; k < classes; ++k) {
            grow[k] += hj * dlogits[k];
            acc += row[k] * dlogits[k];
        }
        dh[j] = cache.h_pre[j] > 0.0 ? acc : 0.0;
    }
    for (int j = 0; j < hidden; ++j) gb1[j] += dh[j];
    for (std::size_t i = 0; i < cache.x.size(); ++i) {
        const double xi = cache.x[i];
        if (xi != 0.0) {
            double* grow = gw1 + i * hidden;
            const double* dhp = dh.data();
            for (int j = 0; j < hidden; ++j) grow[j] += xi * dhp[j];
        }
    }
    if (dx) {
        dx->assign(cache.x.size(), 0.0);
        for (std::size_t i = 0; i < cache.x.size(); ++i) {
            const double* row = w1 + i * hidden;
            double acc = 0.0;
            for (int j = 0; j < hidden; ++j) acc += row[j] * dh[j];
            (*dx)[i] = acc;
        }
    }
}

inline std::vector<double> m6_features_from_spectrum(const ModelSpec& spec,
                                                     const Spectrum& s,
                                                     const MonogenicKernels& k) {
    const M6Maps maps = m6_maps_from_spectrum(s, k);
    return spec.feature_mode == FeatureMode::Hsv6 ? m6_features(m6_encode_hsv(maps))
                                                  : m6_phase_features(maps);
}

}  // namespace detail

// Class probabilities for one image under the current parameters.
inline std::vector<double> model_forward(const ModelState& st, const Image& img,
                                         ForwardCache* cache = nullptr) {
    if (img.height != st.in_h || img.width != st.in_w || img.channels != st.in_c)
        throw std::invalid_argument("model_forward: input shape mismatch");
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    if (st.spec.top == TopKind::M6) {
        const Spectrum spec = m6_input_spectrum(img);
        const FrequencyGrid grid = make_frequency_grid(spec.height, spec.width);
        const MonogenicKernels kernels =
            make_monogenic_kernels(grid, clamp_params(st.m6_params()));
        c.x = detail::m6_features_from_spectrum(st.spec, spec, kernels);
    } else {
        detail::conv_forward(st, img, c.conv_pre, c.x);
    }
    detail::head_forward(st, c.x, c);
    return c.probs;
}

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

inline void validate_dataset(const Dataset& d, const ModelSpec& spec) {
    if (d.images.empty()) throw std::invalid_argument("dataset is empty");
    if (d.images.size() != d.labels.size())
        throw std::invalid_argument("dataset image/label count mismatch");
    const Image& first = d.images.front();
    for (const Image& img : d.images)
        if (!img.same_shape(first))
            throw std::invalid_argument("dataset images differ in shape");
    for (int label : d.labels)
        if (label < 0 || label >= spec.classes)
            throw std::invalid_argument("dataset label out of range");
}

inline EvalResult evaluate(const ModelState& st, const Dataset& d) {
    validate_dataset(d, st.spec);
    const std::size_t n = d.size();
    std::vector<double> losses(n);
    std::vector<unsigned char> correct(n);
    MonogenicKernels kernels;
    if (st.spec.top == TopKind::M6) {
        const FrequencyGrid grid = make_frequency_grid(st.in_h, st.in_w);
        kernels = make_monogenic_kernels(grid, clamp_params(st.m6_params()));
    }
    parallel_for(n, [&](std::size_t i) {
        ForwardCache cache;
        if (st.spec.top == TopKind::M6) {
            const Spectrum spec = m6_input_spectrum(d.images[i]);
            cache.x = detail::m6_features_from_spectrum(st.spec, spec, kernels);
            detail::head_forward(st, cache.x, cache);
        } else {
            detail::conv_forward(st, d.images[i], cache.conv_pre, cache.x);
            detail::head_forward(st, cache.x, cache);
        }
        losses[i] = detail::sample_loss(cache, d.labels[i]);
        const auto best =
            std::max_element(cache.probs.begin(), cache.probs.end());
        correct[i] =
            static_cast<int>(best - cache.probs.begin()) == d.labels[i] ? 1 : 0;
    });
    EvalResult r;
    for (std::size_t i = 0; i < n; ++i) {
        r.loss += losses[i];
        r.accuracy += correct[i];
    }
    r.loss /= static_cast<double>(n);
    r.accuracy /= static_cast<double>(n);
    return r;
}

struct TrainConfig {
    ModelSpec model;
    double lr = 0.001;
    int epochs = 100;
    int batch = 128;
    std::uint64_t seed = 0;
};

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// One Adam update from a gradient of the same layout; M6 slots are clamped to
// their feasible box afterwards.
inline void adam_step(ModelState& st, const std::vector<double>& grad, double lr,
                      const AdamConfig& adam = {}) {
    if (grad.size() != st.theta.size())
        throw std::invalid_argument("adam_step: gradient size mismatch");
    st.adam_t += 1;
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(st.adam_t));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(st.adam_t));
    for (std::size_t i = 0; i < st.theta.size(); ++i) {
        const double g = grad[i];
        st.adam_m[i] = adam.beta1 * st.adam_m[i] + (1.0 - adam.beta1) * g;
        st.adam_v[i] = adam.beta2 * st.adam_v[i] + (1.0 - adam.beta2) * g * g;
        const double mhat = st.adam_m[i] / bc1;
        const double vhat = st.adam_v[i] / bc2;
        st.theta[i] -= lr * mhat / (std::sqrt(vhat) + adam.epsilon);
    }
    if (st.spec.top == TopKind::M6) st.set_m6_params(clamp_params(st.m6_params()));
}

struct EpochStats {
    int epoch = 0;  // 1-based
    double loss = 0.0, val_loss = 0.0;
    double accuracy = 0.0, val_accuracy = 0.0;
    bool has_m6 = false;
    M6Params m6;
};

struct TrainResult {
    ModelState state;
    std::vector<EpochStats> history;
};

namespace detail {

struct SpectrumCache {
    std::vector<Spectrum> specs;
    void build(const Dataset& d) {
        specs.resize(d.size());
        parallel_for(d.size(), [&](std::size_t i) {
            specs[i] = m6_input_spectrum(d.images[i]);
        });
    }
};

// Mean cross-entropy of the M6 model over a set of cached spectra, for given
// filter params (head weights fixed). Fixed-order reduction.
inline double m6_batch_loss(const ModelState& st, const SpectrumCache& cache,
                            const std::vector<std::size_t>& idx,
                            const std::vector<int>& labels, const M6Params& params) {
    const FrequencyGrid grid = make_frequency_grid(st.in_h, st.in_w);
    const MonogenicKernels kernels = make_monogenic_kernels(grid, clamp_params(params));
    std::vector<double> losses(idx.size());
    parallel_for(idx.size(), [&](std::size_t i) {
        ForwardCache fc;
        fc.x = m6_features_from_spectrum(st.spec, cache.specs[idx[i]], kernels);
        head_forward(st, fc.x, fc);
        losses[i] = sample_loss(fc, labels[idx[i]]);
    });
    double total = 0.0;
    for (double l : losses) total += l;
    return total / static_cast<double>(idx.size());
}

// Central finite differences over the four filter slots, h = max(1e-4|p|, 1e-5).
inline std::array<double, 4> m6_grads_fd(const ModelState& st,
                                         const SpectrumCache& cache,
                                         const std::vector<std::size_t>& idx,
                                         const std::vector<int>& labels) {
    static constexpr const char* names[4] = {"s", "f", "omega", "sigma"};
    const M6Params base = st.m6_params();
    std::array<double, 4> flat = {base.s, base.f, base.omega, base.sigma};
    std::array<double, 4> grads{};
    for (int i = 0; i < 4; ++i) {
        const double h = std::max(1e-4 * std::abs(flat[i]), 1e-5);
        auto perturbed = [&](double delta) {
            std::array<double, 4> q = flat;
            q[i] += delta;
            return M6Params{q[0], q[1], q[2], q[3]};
        };
        const double lp = m6_batch_loss(st, cache, idx, labels, perturbed(h));
        const double lm = m6_batch_loss(st, cache, idx, labels, perturbed(-h));
        if (!std::isfinite(lp) || !std::isfinite(lm))
            throw std::runtime_error(
                std::string("m6 gradient: non-finite loss perturbing ") + names[i]);
        grads[i] = (lp - lm) / (2.0 * h);
    }
    return grads;
}

}  // namespace detail

// Trains on split.train, reporting per-epoch validation metrics on split.val.
// The split is used as given (degrade beforehand if desired).
inline TrainResult train(const DataSplit& split, const TrainConfig& config) {
    validate_dataset(split.train, config.model);
    validate_dataset(split.val, config.model);
    if (config.batch < 1 || config.epochs < 0)
        throw std::invalid_argument("train: bad batch/epochs");
    const Image& first = split.train.images.front();
    if (!split.val.images.front().same_shape(first))
        throw std::invalid_argument("train: val/train shape mismatch");

    TrainResult result;
    ModelState& st = result.state;
    st = init_model(config.model, first.height, first.width, first.channels,
                    config.seed);
    const bool m6_top = config.model.top == TopKind::M6;

    detail::SpectrumCache train_cache, val_cache;
    MonogenicKernels kernels;
    const FrequencyGrid grid = make_frequency_grid(st.in_h, st.in_w);
    if (m6_top) {
        train_cache.build(split.train);
        val_cache.build(split.val);
    }

    const std::size_t n = split.train.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng shuffle_rng(derive_seed(config.seed, "shuffle"));

    std::vector<double> grad(st.layout.total);
    std::vector<ForwardCache> caches;
    std::vector<std::size_t> all_val(split.val.size());
    for (std::size_t i = 0; i < all_val.size(); ++i) all_val[i] = i;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t epoch_correct = 0;

        for (std::size_t start = 0; start < n; start += config.batch) {
            const std::size_t bn = std::min<std::size_t>(config.batch, n - start);
            const std::vector<std::size_t> idx(order.begin() + start,
                                               order.begin() + start + bn);
            if (m6_top)
                kernels = make_monogenic_kernels(grid, clamp_params(st.m6_params()));
            caches.assign(bn, ForwardCache{});
            parallel_for(bn, [&](std::size_t i) {
                ForwardCache& fc = caches[i];
                if (m6_top) {
                    fc.x = detail::m6_features_from_spectrum(
                        st.spec, train_cache.specs[idx[i]], kernels);
                } else {
                    detail::conv_forward(st, split.train.images[idx[i]], fc.conv_pre,
                                         fc.x);
                }
                detail::head_forward(st, fc.x, fc);
            });

            std::fill(grad.begin(), grad.end(), 0.0);
            std::vector<double> dx;
            for (std::size_t i = 0; i < bn; ++i) {
                const int label = split.train.labels[idx[i]];
                epoch_loss += detail::sample_loss(caches[i], label);
                const auto best = std::max_element(caches[i].probs.begin(),
                                                   caches[i].probs.end());
                if (static_cast<int>(best - caches[i].probs.begin()) == label)
                    ++epoch_correct;
                detail::head_backward(st, caches[i], label, grad.data(),
                                      m6_top ? nullptr : &dx);
                if (!m6_top)
                    detail::conv_backward(st, split.train.images[idx[i]],
                                          caches[i].conv_pre, dx, grad.data());
            }
            const double inv_bn = 1.0 / static_cast<double>(bn);
            for (double& g : grad) g *= inv_bn;
            if (m6_top) {
                const auto fd =
                    detail::m6_grads_fd(st, train_cache, idx, split.train.labels);
                for (int i = 0; i < 4; ++i) grad[st.layout.m6_off + i] = fd[i];
            }
            adam_step(st, grad, config.lr);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.loss = epoch_loss / static_cast<double>(n);
        stats.accuracy = static_cast<double>(epoch_correct) / static_cast<double>(n);
        if (m6_top) {
            const MonogenicKernels vk =
                make_monogenic_kernels(grid, clamp_params(st.m6_params()));
            std::vector<double> vloss(split.val.size());
            std::vector<unsigned char> vcorrect(split.val.size());
            parallel_for(split.val.size(), [&](std::size_t i) {
                ForwardCache fc;
                fc.x = detail::m6_features_from_spectrum(st.spec, val_cache.specs[i],
                                                         vk);
                detail::head_forward(st, fc.x, fc);
                vloss[i] = detail::sample_loss(fc, split.val.labels[i]);
                const auto best = std::max_element(fc.probs.begin(), fc.probs.end());
                vcorrect[i] = static_cast<int>(best - fc.probs.begin()) ==
                                      split.val.labels[i]
                                  ? 1
                                  : 0;
            });
            double vl = 0.0;
            std::size_t vc = 0;
            for (std::size_t i = 0; i < vloss.size(); ++i) {
                vl += vloss[i];
                vc += vcorrect[i];
            }
            stats.val_loss = vl / static_cast<double>(vloss.size());
            stats.val_accuracy =
                static_cast<double>(vc) / static_cast<double>(vloss.size());
            stats.has_m6 = true;
            stats.m6 = st.m6_params();
        } else {
            const EvalResult val = evaluate(st, split.val);
            stats.val_loss = val.loss;
            stats.val_accuracy = val.accuracy;
        }
        result.history.push_back(stats);
    }
    return result;
}

struct GridConfig {
    TrainConfig train;
    DegradationKind kind = DegradationKind::Scale;
    std::uint64_t degrade_seed = 0;
};

struct GridResult {
    DegradationKind kind = DegradationKind::Scale;
    // accuracy[train_level][test_level]
    std::array<std::array<double, 4>, 4> accuracy{};
    std::vector<std::vector<EpochStats>> histories;  // one per train level
    std::uint64_t seed = 0;
    std::uint64_t degrade_seed = 0;
};

// Trains one model per degradation level of the training data and evaluates
// each on every degraded test set. Degradation streams are derived per part
// and level ("train-d2", "val-d2", "test-d2"). Haze outputs are RGB, so for a
// haze grid grayscale inputs are replicated to RGB in every cell (d0
// included) to keep one input shape across the grid.
inline GridResult run_grid(const DataSplit& base_split, const GridConfig& config) {
    GridResult grid;
    grid.kind = config.kind;
    grid.seed = config.train.seed;
    grid.degrade_seed = config.degrade_seed;

    DataSplit split = base_split;
    if (config.kind == DegradationKind::Haze) {
        for (Dataset* part : {&split.train, &split.val, &split.test})
            for (Image& img : part->images) img = replicate_gray(img);
    }

    std::array<Dataset, 4> test_sets;
    for (int j = 0; j < 4; ++j) {
        const auto level = static_cast<DegradationLevel>(j);
        test_sets[j] = degrade_dataset(
            split.test, DegradationSpec{config.kind, level,
                                        derive_seed(config.degrade_seed,
                                                    std::string("test-") +
                                                        to_string(level))});
    }
    for (int i = 0; i < 4; ++i) {
        const auto level = static_cast<DegradationLevel>(i);
        DataSplit part;
        part.train = degrade_dataset(
            split.train, DegradationSpec{config.kind, level,
                                         derive_seed(config.degrade_seed,
                                                     std::string("train-") +
                                                         to_string(level))});
        part.val = degrade_dataset(
            split.val, DegradationSpec{config.kind, level,
                                       derive_seed(config.degrade_seed,
                                                   std::string("val-") +
                                                       to_string(level))});
        TrainResult res = train(part, config.train);
        grid.histories.push_back(std::move(res.history));
        for (int j = 0; j < 4; ++j)
            grid.accuracy[i][j] = evaluate(res.state, test_sets[j]).accuracy;
    }
    return grid;
}

}  // namespace monolayer
