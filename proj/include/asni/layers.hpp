#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace asni {

enum class LayerKind { linear, conv2d, relu, maxpool2d, flatten };

// One layer of a sequential network. Only the fields for the given kind are
// meaningful.
struct LayerSpec {
    LayerKind kind = LayerKind::relu;

    // linear
    std::int64_t in_features = 0;
    std::int64_t out_features = 0;

    // conv2d
    std::int64_t in_channels = 0;
    std::int64_t out_channels = 0;
    std::int64_t kernel = 0;
    std::int64_t stride = 1;
    std::int64_t padding = 0;

    // maxpool2d
    std::int64_t pool_kernel = 0;
    std::int64_t pool_stride = 0;

    static LayerSpec linear(std::int64_t in, std::int64_t out);
    static LayerSpec conv2d(std::int64_t in_ch, std::int64_t out_ch, std::int64_t kernel,
                            std::int64_t stride = 1, std::int64_t padding = 0);
    static LayerSpec relu();
    static LayerSpec maxpool2d(std::int64_t kernel, std::int64_t stride);
    static LayerSpec flatten();

    bool has_params() const { return kind == LayerKind::linear || kind == LayerKind::conv2d; }
    std::string describe() const;
};

// Sequential architecture: per-sample input shape plus the layer stack.
struct NetworkSpec {
    std::string name;
    std::vector<std::int64_t> input_shape; // per sample, e.g. (1,28,28)
    std::vector<LayerSpec> layers;

    // Walks the stack and returns the per-sample output shape.
    // Throws ShapeError naming the offending layer pair if shapes do not compose.
    std::vector<std::int64_t> validate() const;

    std::int64_t num_classes() const;
    std::int64_t param_count() const;
};

// Architecture presets. Input shape is (1,28,28) for MNIST, (3,32,32) for CIFAR-10.
// fc is LeNet-300-100. conv2/4/6 are the small CNN family with 3x3 pad-1 convs,
// 2x2 maxpools after each conv pair and a 256-256-10 fully connected head.
NetworkSpec make_fc(std::vector<std::int64_t> input_shape);
NetworkSpec make_conv2(std::vector<std::int64_t> input_shape);
NetworkSpec make_conv4(std::vector<std::int64_t> input_shape);
NetworkSpec make_conv6(std::vector<std::int64_t> input_shape);

// Lookup by name: "fc", "conv2", "conv4", "conv6". Throws ConfigError otherwise.
NetworkSpec make_architecture(const std::string& name, std::vector<std::int64_t> input_shape);

} // namespace asni
