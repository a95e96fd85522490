#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fodg/common.hpp"

namespace fodg {

/// Row-major collection of N vectors of dimension n, float32 components.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::uint32_t dim, std::vector<float> data);

    std::uint32_t size() const { return n_rows_; }
    std::uint32_t dim() const { return dim_; }

    std::span<const float> row(std::uint32_t i) const {
        return {data_.data() + static_cast<std::size_t>(i) * dim_, dim_};
    }
    const float* raw() const { return data_.data(); }

private:
    std::uint32_t n_rows_ = 0;
    std::uint32_t dim_ = 0;
    std::vector<float> data_;
};

/// Squared L2 distance. Squared form is order-equivalent to L2 for top-k and
/// avoids the square root on every comparison.
inline float squared_l2(std::span<const float> a, std::span<const float> b) {
    float acc = 0.0f;
    const float* pa = a.data();
    const float* pb = b.data();
    std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        float diff = pa[i] - pb[i];
        acc += diff * diff;
    }
    return acc;
}

/// Checked variant for external callers; the hot paths use squared_l2 directly.
float distance(std::span<const float> a, std::span<const float> b);

}  // namespace fodg
