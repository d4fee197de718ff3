#include <atomic>

#include "femsyn/kernels.hpp"

namespace femsyn::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::switch_below, &scalar::count_set};
#if FEMSYN_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::switch_below, &avx2::count_set};
#endif

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{&table_for(detected_isa())};
    return slot;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if FEMSYN_HAVE_AVX2_KERNELS
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa detected_isa() noexcept {
    static const Isa isa = isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
    return isa;
}

const KernelTable& table_for(Isa isa) noexcept {
#if FEMSYN_HAVE_AVX2_KERNELS
    if (isa == Isa::Avx2 && isa_supported(Isa::Avx2)) return kAvx2;
#endif
    (void)isa;
    return kScalar;
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

Isa set_active(Isa isa) noexcept {
    const KernelTable* prev = active_slot().exchange(&table_for(isa), std::memory_order_acq_rel);
    return prev->isa;
}

std::string_view isa_name(Isa isa) noexcept {
    return isa == Isa::Avx2 ? "avx2" : "scalar";
}

}  // namespace femsyn::kernels
