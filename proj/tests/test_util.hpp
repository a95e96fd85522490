#pragma once

#include <random>
#include <vector>

#include "fodg/dataset.hpp"

namespace fodg::testutil {

/// Uniform [0,1) synthetic dataset; fixed seed = fixed data.
inline Dataset make_uniform_dataset(std::uint32_t n_rows, std::uint32_t dim,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    std::vector<float> data(static_cast<std::size_t>(n_rows) * dim);
    for (auto& v : data) v = dist(rng);
    return Dataset(dim, std::move(data));
}

/// 1-D dataset from explicit coordinates.
inline Dataset make_points_1d(std::vector<float> xs) {
    return Dataset(1, std::move(xs));
}

}  // namespace fodg::testutil
