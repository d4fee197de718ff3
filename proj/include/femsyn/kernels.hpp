#pragma once

// Data-parallel inner loops of the hysteron ensemble. Each kernel has a
// scalar reference implementation and, on x86-64, an AVX2 variant chosen at
// runtime. Variants are required to produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace femsyn::kernels {

enum class Isa { Scalar, Avx2 };

/// Switch every unit whose log threshold is <= cut to `target`:
/// state[i] = (log_threshold[i] <= cut) ? target : state[i].
using SwitchBelowFn = void (*)(std::span<const double> log_threshold,
                               std::span<std::uint8_t> state, double cut,
                               std::uint8_t target);

/// Number of units with state == 1.
using CountSetFn = std::size_t (*)(std::span<const std::uint8_t> state);

struct KernelTable {
    Isa isa;
    SwitchBelowFn switch_below;
    CountSetFn count_set;
};

namespace scalar {
void switch_below(std::span<const double> log_threshold, std::span<std::uint8_t> state,
                  double cut, std::uint8_t target);
std::size_t count_set(std::span<const std::uint8_t> state);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define FEMSYN_HAVE_AVX2_KERNELS 1
namespace avx2 {
void switch_below(std::span<const double> log_threshold, std::span<std::uint8_t> state,
                  double cut, std::uint8_t target);
std::size_t count_set(std::span<const std::uint8_t> state);
}  // namespace avx2
#else
#define FEMSYN_HAVE_AVX2_KERNELS 0
#endif

/// True when the running CPU can execute the given variant.
bool isa_supported(Isa isa) noexcept;

/// Best supported variant, detected once.
Isa detected_isa() noexcept;

/// Table for an explicit variant; falls back to scalar when unsupported.
const KernelTable& table_for(Isa isa) noexcept;

/// Table in use by the library. Defaults to detected_isa().
const KernelTable& active() noexcept;

/// Overrides the active variant (tests, benchmarking). Returns the previous one.
Isa set_active(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;

}  // namespace femsyn::kernels
