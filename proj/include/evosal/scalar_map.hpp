#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace evosal {

/// Single-channel 2-D array of doubles stored row-major.
///
/// A default-constructed map is empty (0x0) and only serves as a placeholder;
/// every map built with dimensions has width >= 1 and height >= 1.
class ScalarMap {
public:
    ScalarMap() = default;
    ScalarMap(int width, int height, double fill = 0.0);
    ScalarMap(int width, int height, std::vector<double> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double operator()(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    /// Value at (x, y) with coordinates clamped to the map (replicate border).
    double clamped(int x, int y) const;

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }

    bool same_shape(const ScalarMap& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    double min() const;
    double max() const;
    double sum() const;
    bool all_finite() const;

    friend bool operator==(const ScalarMap&, const ScalarMap&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Throws ContractViolation unless both maps have the same dimensions.
void require_same_shape(const ScalarMap& a, const ScalarMap& b, const char* where);

ScalarMap map_unary(const ScalarMap& a, const std::function<double(double)>& f);
ScalarMap map_binary(const ScalarMap& a, const ScalarMap& b, const std::function<double(double, double)>& f);

/// Min-max rescale to [0,1]. A constant map becomes all zeros.
ScalarMap rescaled(const ScalarMap& a);

/// Element-wise mean of equally shaped maps.
ScalarMap mean_of(std::span<const ScalarMap> maps);

// Resampling. Nearest uses src = floor(dst * src_size / dst_size).
ScalarMap resize_nearest(const ScalarMap& a, int width, int height);
ScalarMap resize_bilinear(const ScalarMap& a, int width, int height);
/// Catmull-Rom style bicubic (a = -0.5), replicate borders. May overshoot the input range.
ScalarMap resize_bicubic(const ScalarMap& a, int width, int height);
/// Box-filter (area) resampling; exact averaging for integer downscale factors.
ScalarMap resize_area(const ScalarMap& a, int width, int height);

/// Sum with pairwise (cascade) reduction; order-independent of thread count.
double pairwise_sum(std::span<const double> values);

} // namespace evosal
