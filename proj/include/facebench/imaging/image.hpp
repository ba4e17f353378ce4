#ifndef FACEBENCH_IMAGING_IMAGE_HPP
#define FACEBENCH_IMAGING_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "facebench/core/error.hpp"

namespace facebench {

// RGB raster. Intensities are real values in [0,1]; 8-bit quantization happens
// only at file boundaries. Interleaved row-major storage, 3 channels.
class Image {
public:
    Image() = default;

    Image(int width, int height, double fill = 0.0) : w_(width), h_(height) {
        if (width < 1 || height < 1)
            throw ContractViolation("Image dimensions must be >= 1");
        data_.assign(static_cast<std::size_t>(w_) * h_ * 3, static_cast<float>(fill));
    }

    int width() const { return w_; }
    int height() const { return h_; }
    bool empty() const { return data_.empty(); }

    float& at(int x, int y, int c) { return data_[(static_cast<std::size_t>(y) * w_ + x) * 3 + c]; }
    float at(int x, int y, int c) const { return data_[(static_cast<std::size_t>(y) * w_ + x) * 3 + c]; }

    void set(int x, int y, double r, double g, double b) {
        at(x, y, 0) = static_cast<float>(r);
        at(x, y, 1) = static_cast<float>(g);
        at(x, y, 2) = static_cast<float>(b);
    }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    void clamp01() {
        for (float& v : data_) v = std::min(1.0f, std::max(0.0f, v));
    }

    bool same_dims(const Image& o) const { return w_ == o.w_ && h_ == o.h_; }

    static std::uint8_t quantize(float v) {
        const float c = std::min(1.0f, std::max(0.0f, v));
        return static_cast<std::uint8_t>(std::lround(c * 255.0f));
    }

    static float dequantize(std::uint8_t v) { return static_cast<float>(v) / 255.0f; }

private:
    int w_ = 0;
    int h_ = 0;
    std::vector<float> data_;
};

// Single-channel coverage map in [0,1], same layout conventions as Image.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, double fill = 0.0)
        : w_(width), h_(height), data_(static_cast<std::size_t>(width) * height, static_cast<float>(fill)) {
        if (width < 1 || height < 1)
            throw ContractViolation("Mask dimensions must be >= 1");
    }

    int width() const { return w_; }
    int height() const { return h_; }

    float& at(int x, int y) { return data_[static_cast<std::size_t>(y) * w_ + x]; }
    float at(int x, int y) const { return data_[static_cast<std::size_t>(y) * w_ + x]; }

private:
    int w_ = 0;
    int h_ = 0;
    std::vector<float> data_;
};

} // namespace facebench

#endif
