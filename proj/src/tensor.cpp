#include "asni/tensor.hpp"

#include <cmath>
#include <sstream>

#include "asni/errors.hpp"

namespace asni {

std::int64_t shape_numel(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (std::int64_t e : shape) n *= e;
    return n;
}

std::string shape_to_string(const std::vector<std::int64_t>& shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << ")";
    return os.str();
}

Tensor::Tensor(std::vector<std::int64_t> s, std::vector<float> d)
    : shape(std::move(s)), data(std::move(d)) {
    for (std::int64_t e : shape) {
        if (e <= 0) throw ShapeError("tensor extent must be positive, got shape " + shape_to_string(shape));
    }
    if (shape_numel(shape) != static_cast<std::int64_t>(data.size())) {
        throw ShapeError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_to_string(shape));
    }
}

Tensor Tensor::zeros(std::vector<std::int64_t> shape) {
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<float>(static_cast<std::size_t>(n), 0.0f));
}

Tensor Tensor::full(std::vector<std::int64_t> shape, float value) {
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<float>(static_cast<std::size_t>(n), value));
}

bool Tensor::all_finite() const {
    for (float v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

} // namespace asni
