#pragma once

#include <cstddef>
#include <span>

namespace whirlbench {

/// Pairwise (cascade) summation; result is independent of how the caller
/// batches the terms as long as their order is fixed.
template <typename T>
T pairwise_sum(std::span<const T> terms) {
    if (terms.empty()) return T{};
    if (terms.size() <= 8) {
        T acc = terms[0];
        for (std::size_t i = 1; i < terms.size(); ++i) acc += terms[i];
        return acc;
    }
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace whirlbench
