#include "femsyn/kernels.hpp"

namespace femsyn::kernels::scalar {

void switch_below(std::span<const double> log_threshold, std::span<std::uint8_t> state,
                  double cut, std::uint8_t target) {
    const std::size_t n = log_threshold.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (log_threshold[i] <= cut) state[i] = target;
    }
}

std::size_t count_set(std::span<const std::uint8_t> state) {
    std::size_t count = 0;
    for (std::uint8_t s : state) count += s;
    return count;
}

}  // namespace femsyn::kernels::scalar
