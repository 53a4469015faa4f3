#include "asni/network.hpp"

#include <Eigen/Core>
#include <cmath>
#include <cstring>
#include <limits>

#include "asni/errors.hpp"
#include "asni/rng.hpp"

namespace asni {

namespace {

using MatRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using MapCM = Eigen::Map<const MatRM>;

std::int64_t fan_in_of(const LayerSpec& layer) {
    if (layer.kind == LayerKind::linear) return layer.in_features;
    return layer.in_channels * layer.kernel * layer.kernel;
}

// W then b entry index per layer; -1 for parameterless layers.
std::vector<std::pair<int, int>> param_index_by_layer(const ParamStore& params,
                                                      const NetworkSpec& spec) {
    std::vector<std::pair<int, int>> map(spec.layers.size(), {-1, -1});
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& e = params.entry(i);
        if (e.layer_index < 0) continue;
        auto& slot = map[static_cast<std::size_t>(e.layer_index)];
        if (e.prunable) {
            slot.first = static_cast<int>(i);
        } else {
            slot.second = static_cast<int>(i);
        }
    }
    return map;
}

// Per-sample im2col: (C,H,W) input into a (C*k*k) x (Ho*Wo) patch matrix.
void im2col(const float* src, std::int64_t c, std::int64_t h, std::int64_t w,
            std::int64_t kernel, std::int64_t stride, std::int64_t pad,
            std::int64_t ho, std::int64_t wo, float* cols) {
    const std::int64_t patch = kernel * kernel;
    const std::int64_t out_px = ho * wo;
    for (std::int64_t ch = 0; ch < c; ++ch) {
        const float* plane = src + ch * h * w;
        for (std::int64_t ki = 0; ki < kernel; ++ki) {
            for (std::int64_t kj = 0; kj < kernel; ++kj) {
                float* row = cols + (ch * patch + ki * kernel + kj) * out_px;
                for (std::int64_t oy = 0; oy < ho; ++oy) {
                    const std::int64_t iy = oy * stride - pad + ki;
                    if (iy < 0 || iy >= h) {
                        std::memset(row + oy * wo, 0, sizeof(float) * static_cast<std::size_t>(wo));
                        continue;
                    }
                    const float* srow = plane + iy * w;
                    float* drow = row + oy * wo;
                    for (std::int64_t ox = 0; ox < wo; ++ox) {
                        const std::int64_t ix = ox * stride - pad + kj;
                        drow[ox] = (ix >= 0 && ix < w) ? srow[ix] : 0.0f;
                    }
                }
            }
        }
    }
}

// Transpose of im2col: scatter-add patch-matrix gradients back onto the image.
void col2im_add(const float* cols, std::int64_t c, std::int64_t h, std::int64_t w,
                std::int64_t kernel, std::int64_t stride, std::int64_t pad,
                std::int64_t ho, std::int64_t wo, float* dst) {
    const std::int64_t patch = kernel * kernel;
    const std::int64_t out_px = ho * wo;
    for (std::int64_t ch = 0; ch < c; ++ch) {
        float* plane = dst + ch * h * w;
        for (std::int64_t ki = 0; ki < kernel; ++ki) {
            for (std::int64_t kj = 0; kj < kernel; ++kj) {
                const float* row = cols + (ch * patch + ki * kernel + kj) * out_px;
                for (std::int64_t oy = 0; oy < ho; ++oy) {
                    const std::int64_t iy = oy * stride - pad + ki;
                    if (iy < 0 || iy >= h) continue;
                    float* drow = plane + iy * w;
                    const float* srow = row + oy * wo;
                    for (std::int64_t ox = 0; ox < wo; ++ox) {
                        const std::int64_t ix = ox * stride - pad + kj;
                        if (ix >= 0 && ix < w) drow[ix] += srow[ox];
                    }
                }
            }
        }
    }
}

struct LayerIo {
    std::vector<std::int64_t> in_shape;  // per sample
    std::vector<std::int64_t> out_shape; // per sample
};

struct ForwardCache {
    std::vector<Tensor> inputs;                       // input tensor per layer
    std::vector<std::vector<std::int32_t>> pool_arg;  // argmax per maxpool layer
    Tensor logits;
};

Tensor run_forward(const ParamStore& params, const NetworkSpec& spec, const Batch& batch,
                   ForwardCache* cache) {
    const std::vector<std::int64_t> out_shape = spec.validate();

    // Batch input must be (B, input_shape...).
    std::vector<std::int64_t> expect = {batch.size()};
    expect.insert(expect.end(), spec.input_shape.begin(), spec.input_shape.end());
    if (batch.inputs.shape != expect) {
        throw ShapeError("batch input shape " + shape_to_string(batch.inputs.shape) +
                         " does not match expected " + shape_to_string(expect));
    }
    if (batch.size() < 1) throw ShapeError("batch must contain at least one sample");

    const auto pmap = param_index_by_layer(params, spec);
    const std::int64_t b = batch.size();

    Tensor x = batch.inputs;
    std::vector<std::int64_t> sample_shape = spec.input_shape;
    std::vector<float> cols;

    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        const LayerSpec& layer = spec.layers[li];
        if (cache) cache->inputs.push_back(x);

        switch (layer.kind) {
            case LayerKind::linear: {
                const Tensor& wt = params.entry(static_cast<std::size_t>(pmap[li].first)).tensor;
                const Tensor& bt = params.entry(static_cast<std::size_t>(pmap[li].second)).tensor;
                Tensor y = Tensor::zeros({b, layer.out_features});
                MapCM xm(x.ptr(), b, layer.in_features);
                MapCM wm(wt.ptr(), layer.out_features, layer.in_features);
                MapM ym(y.ptr(), b, layer.out_features);
                ym.noalias() = xm * wm.transpose();
                ym.rowwise() += Eigen::Map<const Eigen::RowVectorXf>(bt.ptr(), layer.out_features);
                x = std::move(y);
                sample_shape = {layer.out_features};
                break;
            }
            case LayerKind::conv2d: {
                const Tensor& wt = params.entry(static_cast<std::size_t>(pmap[li].first)).tensor;
                const Tensor& bt = params.entry(static_cast<std::size_t>(pmap[li].second)).tensor;
                const std::int64_t c = sample_shape[0], h = sample_shape[1], w = sample_shape[2];
                const std::int64_t ho = (h + 2 * layer.padding - layer.kernel) / layer.stride + 1;
                const std::int64_t wo = (w + 2 * layer.padding - layer.kernel) / layer.stride + 1;
                const std::int64_t o = layer.out_channels;
                const std::int64_t patch_rows = c * layer.kernel * layer.kernel;
                Tensor y = Tensor::zeros({b, o, ho, wo});
                cols.resize(static_cast<std::size_t>(patch_rows * ho * wo));
                MapCM wm(wt.ptr(), o, patch_rows);
                for (std::int64_t s = 0; s < b; ++s) {
                    im2col(x.ptr() + s * c * h * w, c, h, w, layer.kernel, layer.stride,
                           layer.padding, ho, wo, cols.data());
                    MapCM cm(cols.data(), patch_rows, ho * wo);
                    MapM ym(y.ptr() + s * o * ho * wo, o, ho * wo);
                    ym.noalias() = wm * cm;
                    ym.colwise() += Eigen::Map<const Eigen::VectorXf>(bt.ptr(), o);
                }
                x = std::move(y);
                sample_shape = {o, ho, wo};
                break;
            }
            case LayerKind::relu: {
                Tensor y = x;
                for (float& v : y.data) v = v > 0.0f ? v : 0.0f;
                x = std::move(y);
                break;
            }
            case LayerKind::maxpool2d: {
                const std::int64_t c = sample_shape[0], h = sample_shape[1], w = sample_shape[2];
                const std::int64_t k = layer.pool_kernel, st = layer.pool_stride;
                const std::int64_t ho = (h - k) / st + 1;
                const std::int64_t wo = (w - k) / st + 1;
                Tensor y = Tensor::zeros({b, c, ho, wo});
                std::vector<std::int32_t> arg;
                if (cache) arg.resize(static_cast<std::size_t>(b * c * ho * wo));
                for (std::int64_t s = 0; s < b; ++s) {
                    for (std::int64_t ch = 0; ch < c; ++ch) {
                        const float* plane = x.ptr() + (s * c + ch) * h * w;
                        float* out = y.ptr() + (s * c + ch) * ho * wo;
                        std::int32_t* ap =
                            cache ? arg.data() + (s * c + ch) * ho * wo : nullptr;
                        for (std::int64_t oy = 0; oy < ho; ++oy) {
                            for (std::int64_t ox = 0; ox < wo; ++ox) {
                                float best = -std::numeric_limits<float>::infinity();
                                std::int32_t best_i = 0;
                                for (std::int64_t ki = 0; ki < k; ++ki) {
                                    for (std::int64_t kj = 0; kj < k; ++kj) {
                                        const std::int64_t iy = oy * st + ki;
                                        const std::int64_t ix = ox * st + kj;
                                        const float v = plane[iy * w + ix];
                                        if (v > best) {
                                            best = v;
                                            best_i = static_cast<std::int32_t>(iy * w + ix);
                                        }
                                    }
                                }
                                out[oy * wo + ox] = best;
                                if (ap) ap[oy * wo + ox] = best_i;
                            }
                        }
                    }
                }
                if (cache) cache->pool_arg.push_back(std::move(arg));
                x = std::move(y);
                sample_shape = {c, ho, wo};
                break;
            }
            case LayerKind::flatten: {
                const std::int64_t n = shape_numel(sample_shape);
                x.shape = {b, n};
                sample_shape = {n};
                break;
            }
        }
    }

    if (!x.all_finite()) throw NumericError("forward pass produced non-finite logits");
    if (cache) cache->logits = x;
    return x;
}

} // namespace

ParamStore build_network(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    ParamStore store;
    int conv_n = 0, fc_n = 0;
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        const LayerSpec& layer = spec.layers[li];
        if (!layer.has_params()) continue;

        std::string base;
        Tensor weight;
        Tensor bias;
        if (layer.kind == LayerKind::linear) {
            base = "fc" + std::to_string(++fc_n);
            weight = Tensor::zeros({layer.out_features, layer.in_features});
            bias = Tensor::zeros({layer.out_features});
        } else {
            base = "conv" + std::to_string(++conv_n);
            weight = Tensor::zeros(
                {layer.out_channels, layer.in_channels, layer.kernel, layer.kernel});
            bias = Tensor::zeros({layer.out_channels});
        }
        const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in_of(layer)));
        for (float& v : weight.data) {
            v = static_cast<float>(stddev * rng.next_normal());
        }
        store.add({base + ".weight", std::move(weight), true, static_cast<int>(li)});
        store.add({base + ".bias", std::move(bias), false, static_cast<int>(li)});
    }
    return store;
}

Tensor forward(const ParamStore& params, const NetworkSpec& spec, const Batch& batch) {
    return run_forward(params, spec, batch, nullptr);
}

LossGrad loss_and_grad(const ParamStore& params, const NetworkSpec& spec, const Batch& batch) {
    const std::int64_t classes = spec.num_classes();
    for (std::int32_t label : batch.labels) {
        if (label < 0 || label >= classes) {
            throw ConfigError("label " + std::to_string(label) + " out of range [0," +
                              std::to_string(classes) + ")");
        }
    }

    ForwardCache cache;
    Tensor logits = run_forward(params, spec, batch, &cache);
    const std::int64_t b = batch.size();

    // Softmax cross-entropy with max subtraction; dlogits = (softmax - onehot)/B.
    Tensor dlogits = Tensor::zeros(logits.shape);
    float loss_sum = 0.0f;
    for (std::int64_t s = 0; s < b; ++s) {
        const float* row = logits.ptr() + s * classes;
        float* drow = dlogits.ptr() + s * classes;
        float mx = row[0];
        for (std::int64_t c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
        float denom = 0.0f;
        for (std::int64_t c = 0; c < classes; ++c) denom += std::exp(row[c] - mx);
        const std::int64_t y = batch.labels[static_cast<std::size_t>(s)];
        loss_sum += std::log(denom) - (row[y] - mx);
        const float inv_b = 1.0f / static_cast<float>(b);
        for (std::int64_t c = 0; c < classes; ++c) {
            drow[c] = std::exp(row[c] - mx) / denom * inv_b;
        }
        drow[y] -= inv_b;
    }
    const double loss = static_cast<double>(loss_sum / static_cast<float>(b));

    // Backward pass.
    Gradients grads;
    grads.tensors.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        grads.tensors.push_back(Tensor::zeros(params.entry(i).tensor.shape));
    }

    const auto pmap = param_index_by_layer(params, spec);
    Tensor dx = std::move(dlogits);
    std::size_t pool_cursor = cache.pool_arg.size();
    std::vector<float> cols;
    std::vector<float> dcols;

    for (std::size_t li = spec.layers.size(); li-- > 0;) {
        const LayerSpec& layer = spec.layers[li];
        const Tensor& input = cache.inputs[li];

        switch (layer.kind) {
            case LayerKind::linear: {
                const Tensor& wt = params.entry(static_cast<std::size_t>(pmap[li].first)).tensor;
                Tensor& dw = grads.tensors[static_cast<std::size_t>(pmap[li].first)];
                Tensor& db = grads.tensors[static_cast<std::size_t>(pmap[li].second)];
                MapCM dym(dx.ptr(), b, layer.out_features);
                MapCM xm(input.ptr(), b, layer.in_features);
                MapCM wm(wt.ptr(), layer.out_features, layer.in_features);
                MapM dwm(dw.ptr(), layer.out_features, layer.in_features);
                dwm.noalias() = dym.transpose() * xm;
                Eigen::Map<Eigen::RowVectorXf>(db.ptr(), layer.out_features) =
                    dym.colwise().sum();
                Tensor dprev = Tensor::zeros(input.shape);
                MapM dxm(dprev.ptr(), b, layer.in_features);
                dxm.noalias() = dym * wm;
                dx = std::move(dprev);
                break;
            }
            case LayerKind::conv2d: {
                const Tensor& wt = params.entry(static_cast<std::size_t>(pmap[li].first)).tensor;
                Tensor& dw = grads.tensors[static_cast<std::size_t>(pmap[li].first)];
                Tensor& db = grads.tensors[static_cast<std::size_t>(pmap[li].second)];
                const std::int64_t c = input.shape[1], h = input.shape[2], w = input.shape[3];
                const std::int64_t o = layer.out_channels;
                const std::int64_t ho = dx.shape[2], wo = dx.shape[3];
                const std::int64_t patch_rows = c * layer.kernel * layer.kernel;
                cols.resize(static_cast<std::size_t>(patch_rows * ho * wo));
                dcols.resize(static_cast<std::size_t>(patch_rows * ho * wo));
                Tensor dprev = Tensor::zeros(input.shape);
                MapCM wm(wt.ptr(), o, patch_rows);
                MapM dwm(dw.ptr(), o, patch_rows);
                Eigen::Map<Eigen::VectorXf> dbm(db.ptr(), o);
                for (std::int64_t s = 0; s < b; ++s) {
                    im2col(input.ptr() + s * c * h * w, c, h, w, layer.kernel, layer.stride,
                           layer.padding, ho, wo, cols.data());
                    MapCM cm(cols.data(), patch_rows, ho * wo);
                    MapCM dym(dx.ptr() + s * o * ho * wo, o, ho * wo);
                    dwm.noalias() += dym * cm.transpose();
                    dbm += dym.rowwise().sum();
                    MapM dcm(dcols.data(), patch_rows, ho * wo);
                    dcm.noalias() = wm.transpose() * dym;
                    col2im_add(dcols.data(), c, h, w, layer.kernel, layer.stride, layer.padding,
                               ho, wo, dprev.ptr() + s * c * h * w);
                }
                dx = std::move(dprev);
                break;
            }
            case LayerKind::relu: {
                Tensor dprev = std::move(dx);
                const float* in = input.ptr();
                float* dp = dprev.ptr();
                const std::int64_t n = input.numel();
                for (std::int64_t i = 0; i < n; ++i) {
                    if (in[i] <= 0.0f) dp[i] = 0.0f;
                }
                dx = std::move(dprev);
                break;
            }
            case LayerKind::maxpool2d: {
                --pool_cursor;
                const auto& arg = cache.pool_arg[pool_cursor];
                const std::int64_t c = input.shape[1], h = input.shape[2], w = input.shape[3];
                const std::int64_t ho = dx.shape[2], wo = dx.shape[3];
                Tensor dprev = Tensor::zeros(input.shape);
                for (std::int64_t s = 0; s < b; ++s) {
                    for (std::int64_t ch = 0; ch < c; ++ch) {
                        const float* dyp = dx.ptr() + (s * c + ch) * ho * wo;
                        const std::int32_t* ap = arg.data() + (s * c + ch) * ho * wo;
                        float* dpp = dprev.ptr() + (s * c + ch) * h * w;
                        for (std::int64_t i = 0; i < ho * wo; ++i) {
                            dpp[ap[i]] += dyp[i];
                        }
                    }
                }
                dx = std::move(dprev);
                break;
            }
            case LayerKind::flatten: {
                dx.shape = input.shape;
                break;
            }
        }
    }

    return {loss, std::move(grads)};
}

double accuracy(const ParamStore& params, const NetworkSpec& spec, const Tensor& inputs,
                const std::vector<std::int32_t>& labels, std::int64_t chunk) {
    const std::int64_t n = inputs.shape[0];
    if (n != static_cast<std::int64_t>(labels.size())) {
        throw ShapeError("inputs/labels count mismatch: " + std::to_string(n) + " vs " +
                         std::to_string(labels.size()));
    }
    const std::int64_t sample = shape_numel(inputs.shape) / n;
    std::int64_t hits = 0;
    for (std::int64_t at = 0; at < n; at += chunk) {
        const std::int64_t take = std::min(chunk, n - at);
        Batch batch;
        std::vector<std::int64_t> shape = {take};
        shape.insert(shape.end(), inputs.shape.begin() + 1, inputs.shape.end());
        batch.inputs = Tensor(std::move(shape),
                              std::vector<float>(inputs.data.begin() + at * sample,
                                                 inputs.data.begin() + (at + take) * sample));
        batch.labels.assign(labels.begin() + at, labels.begin() + at + take);
        Tensor logits = forward(params, spec, batch);
        const std::int64_t classes = logits.shape[1];
        for (std::int64_t s = 0; s < take; ++s) {
            const float* row = logits.ptr() + s * classes;
            std::int64_t best = 0;
            for (std::int64_t c = 1; c < classes; ++c) {
                if (row[c] > row[best]) best = c; // ties keep the lowest index
            }
            if (best == labels[static_cast<std::size_t>(at + s)]) ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

} // namespace asni
