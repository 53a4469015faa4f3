#include "asni/layers.hpp"

#include <sstream>

#include "asni/errors.hpp"
#include "asni/tensor.hpp"

namespace asni {

LayerSpec LayerSpec::linear(std::int64_t in, std::int64_t out) {
    LayerSpec s;
    s.kind = LayerKind::linear;
    s.in_features = in;
    s.out_features = out;
    return s;
}

LayerSpec LayerSpec::conv2d(std::int64_t in_ch, std::int64_t out_ch, std::int64_t kernel,
                            std::int64_t stride, std::int64_t padding) {
    LayerSpec s;
    s.kind = LayerKind::conv2d;
    s.in_channels = in_ch;
    s.out_channels = out_ch;
    s.kernel = kernel;
    s.stride = stride;
    s.padding = padding;
    return s;
}

LayerSpec LayerSpec::relu() {
    LayerSpec s;
    s.kind = LayerKind::relu;
    return s;
}

LayerSpec LayerSpec::maxpool2d(std::int64_t kernel, std::int64_t stride) {
    LayerSpec s;
    s.kind = LayerKind::maxpool2d;
    s.pool_kernel = kernel;
    s.pool_stride = stride;
    return s;
}

LayerSpec LayerSpec::flatten() {
    LayerSpec s;
    s.kind = LayerKind::flatten;
    return s;
}

std::string LayerSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case LayerKind::linear:
            os << "linear " << in_features << "->" << out_features;
            break;
        case LayerKind::conv2d:
            os << "conv2d " << in_channels << "->" << out_channels << " k" << kernel
               << " s" << stride << " p" << padding;
            break;
        case LayerKind::relu:
            os << "relu";
            break;
        case LayerKind::maxpool2d:
            os << "maxpool2d k" << pool_kernel << " s" << pool_stride;
            break;
        case LayerKind::flatten:
            os << "flatten";
            break;
    }
    return os.str();
}

namespace {

std::vector<std::int64_t> apply_layer_shape(const std::vector<std::int64_t>& in,
                                            const LayerSpec& layer, std::size_t index,
                                            const std::string& prev_desc) {
    auto fail = [&](const std::string& why) {
        std::ostringstream os;
        os << "layer " << index << " (" << layer.describe() << ") does not compose with "
           << prev_desc << ": " << why;
        throw ShapeError(os.str());
    };

    switch (layer.kind) {
        case LayerKind::linear: {
            if (in.size() != 1) fail("expected flat input, got shape " + shape_to_string(in));
            if (in[0] != layer.in_features)
                fail("expected " + std::to_string(layer.in_features) + " features, got " +
                     std::to_string(in[0]));
            return {layer.out_features};
        }
        case LayerKind::conv2d: {
            if (in.size() != 3) fail("expected (C,H,W) input, got shape " + shape_to_string(in));
            if (in[0] != layer.in_channels)
                fail("expected " + std::to_string(layer.in_channels) + " channels, got " +
                     std::to_string(in[0]));
            const std::int64_t h =
                (in[1] + 2 * layer.padding - layer.kernel) / layer.stride + 1;
            const std::int64_t w =
                (in[2] + 2 * layer.padding - layer.kernel) / layer.stride + 1;
            if (h <= 0 || w <= 0) fail("output spatial size is non-positive");
            return {layer.out_channels, h, w};
        }
        case LayerKind::relu:
            return in;
        case LayerKind::maxpool2d: {
            if (in.size() != 3) fail("expected (C,H,W) input, got shape " + shape_to_string(in));
            const std::int64_t h = (in[1] - layer.pool_kernel) / layer.pool_stride + 1;
            const std::int64_t w = (in[2] - layer.pool_kernel) / layer.pool_stride + 1;
            if (h <= 0 || w <= 0) fail("output spatial size is non-positive");
            return {in[0], h, w};
        }
        case LayerKind::flatten:
            return {shape_numel(in)};
    }
    fail("unknown layer kind");
    return {};
}

} // namespace

std::vector<std::int64_t> NetworkSpec::validate() const {
    if (layers.empty()) throw ShapeError("network has no layers");
    std::vector<std::int64_t> shape = input_shape;
    std::string prev = "input " + shape_to_string(shape);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        shape = apply_layer_shape(shape, layers[i], i, prev);
        prev = "layer " + std::to_string(i) + " (" + layers[i].describe() + ")";
    }
    if (shape.size() != 1)
        throw ShapeError("network output must be flat class logits, got " + shape_to_string(shape));
    return shape;
}

std::int64_t NetworkSpec::num_classes() const {
    return validate()[0];
}

std::int64_t NetworkSpec::param_count() const {
    std::int64_t n = 0;
    for (const auto& layer : layers) {
        if (layer.kind == LayerKind::linear) {
            n += layer.in_features * layer.out_features + layer.out_features;
        } else if (layer.kind == LayerKind::conv2d) {
            n += layer.in_channels * layer.out_channels * layer.kernel * layer.kernel +
                 layer.out_channels;
        }
    }
    return n;
}

NetworkSpec make_fc(std::vector<std::int64_t> input_shape) {
    NetworkSpec spec;
    spec.name = "fc";
    spec.input_shape = std::move(input_shape);
    const std::int64_t in = shape_numel(spec.input_shape);
    spec.layers = {
        LayerSpec::flatten(),
        LayerSpec::linear(in, 300),
        LayerSpec::relu(),
        LayerSpec::linear(300, 100),
        LayerSpec::relu(),
        LayerSpec::linear(100, 10),
    };
    spec.validate();
    return spec;
}

namespace {

// Shared conv-family builder: `blocks` lists the channel width of each conv
// pair; every pair is followed by a 2x2 maxpool, then a 256-256-10 head.
NetworkSpec make_conv_family(const std::string& name, std::vector<std::int64_t> input_shape,
                             const std::vector<std::int64_t>& blocks) {
    NetworkSpec spec;
    spec.name = name;
    spec.input_shape = std::move(input_shape);

    std::int64_t ch = spec.input_shape[0];
    std::int64_t h = spec.input_shape[1];
    std::int64_t w = spec.input_shape[2];
    for (std::int64_t width : blocks) {
        spec.layers.push_back(LayerSpec::conv2d(ch, width, 3, 1, 1));
        spec.layers.push_back(LayerSpec::relu());
        spec.layers.push_back(LayerSpec::conv2d(width, width, 3, 1, 1));
        spec.layers.push_back(LayerSpec::relu());
        spec.layers.push_back(LayerSpec::maxpool2d(2, 2));
        ch = width;
        h /= 2;
        w /= 2;
    }
    spec.layers.push_back(LayerSpec::flatten());
    spec.layers.push_back(LayerSpec::linear(ch * h * w, 256));
    spec.layers.push_back(LayerSpec::relu());
    spec.layers.push_back(LayerSpec::linear(256, 256));
    spec.layers.push_back(LayerSpec::relu());
    spec.layers.push_back(LayerSpec::linear(256, 10));
    spec.validate();
    return spec;
}

} // namespace

NetworkSpec make_conv2(std::vector<std::int64_t> input_shape) {
    return make_conv_family("conv2", std::move(input_shape), {64});
}

NetworkSpec make_conv4(std::vector<std::int64_t> input_shape) {
    return make_conv_family("conv4", std::move(input_shape), {64, 128});
}

NetworkSpec make_conv6(std::vector<std::int64_t> input_shape) {
    return make_conv_family("conv6", std::move(input_shape), {64, 128, 256});
}

NetworkSpec make_architecture(const std::string& name, std::vector<std::int64_t> input_shape) {
    if (name == "fc") return make_fc(std::move(input_shape));
    if (name == "conv2") return make_conv2(std::move(input_shape));
    if (name == "conv4") return make_conv4(std::move(input_shape));
    if (name == "conv6") return make_conv6(std::move(input_shape));
    throw ConfigError("unknown architecture '" + name + "'");
}

} // namespace asni
