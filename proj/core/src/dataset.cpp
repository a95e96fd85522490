#include "fodg/dataset.hpp"

#include <cmath>

namespace fodg {

Dataset::Dataset(std::uint32_t dim, std::vector<float> data) : dim_(dim), data_(std::move(data)) {
    if (dim_ == 0) throw UsageError("dataset dimension must be >= 1");
    if (data_.empty() || data_.size() % dim_ != 0)
        throw UsageError("dataset size is not a multiple of the dimension");
    std::size_t rows = data_.size() / dim_;
    if (rows > kMaxNodes)
        throw UsageError("dataset exceeds 2^31 - 1 vectors (index MSB is reserved)");
    for (float v : data_) {
        if (!std::isfinite(v)) throw UsageError("dataset contains non-finite components");
    }
    n_rows_ = static_cast<std::uint32_t>(rows);
}

float distance(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw UsageError("distance: dimension mismatch");
    return squared_l2(a, b);
}

}  // namespace fodg
