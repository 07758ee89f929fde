#include <cstdlib>
#include <stdexcept>
#include <string>

#include "stickylab/kernels.hpp"

namespace stickylab {

namespace {

const Kernels& pick() {
    const char* env = std::getenv("STICKYLAB_KERNEL");
    std::string want = env ? env : "auto";
    if (want == "scalar") return scalar_kernels();
    if (want == "avx2") {
        const Kernels* k = avx2_kernels();
        if (!k) throw std::runtime_error("STICKYLAB_KERNEL=avx2 but CPU lacks AVX2");
        return *k;
    }
    if (want != "auto")
        throw std::runtime_error("STICKYLAB_KERNEL must be scalar, avx2 or auto, got '" +
                                 want + "'");
    const Kernels* k = avx2_kernels();
    return k ? *k : scalar_kernels();
}

}  // namespace

const Kernels& active_kernels() {
    static const Kernels& k = pick();
    return k;
}

}  // namespace stickylab
