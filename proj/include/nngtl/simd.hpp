#pragma once
/**
 * @file  simd.hpp
 * @brief Squared-distance scan kernels with a scalar reference and an AVX2 variant.
 *
 * Both variants evaluate dx*dx + dy*dy with the same operation order and no fused
 * multiply-add, so their outputs are bit-identical.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nngtl::simd
{
    enum class Backend
    {
        Scalar,
        Avx2,
    };

    struct Nearest
    {
        std::size_t index = 0; ///< first index attaining the minimum
        double d2 = 0.0;
    };

    struct Kernels
    {
        /// Requires a nonempty input.
        Nearest (*nearest) (const double *xs, const double *ys, std::size_t n, double qx, double qy);
        /// Appends base + i for every i with squared distance <= r2, in increasing i.
        void (*within) (const double *xs, const double *ys, std::size_t n, double qx, double qy, double r2, std::uint32_t base, std::vector<std::uint32_t> &out);
        /// out[j] = min(out[j], min_i (px[j]-xs[i])^2 + (py[j]-ys[i])^2) for j < m.
        void (*min_sq_distance) (const double *px, const double *py, std::size_t m, const double *xs, const double *ys, std::size_t n, double *out);
    };

    const Kernels &scalar_kernels () noexcept;
    /// Null when the binary was built without AVX2 support.
    const Kernels *avx2_kernels () noexcept;

    bool cpu_has_avx2 () noexcept;

    /// Backend chosen at first use: AVX2 when the CPU supports it, unless the
    /// environment variable NNGTL_SIMD=scalar forces the reference path.
    Backend active_backend () noexcept;
    const Kernels &active () noexcept;

    /// Test hook. Selecting Avx2 on a machine without it falls back to Scalar.
    void force_backend (Backend b) noexcept;

    const char *to_string (Backend b) noexcept;

} // namespace nngtl::simd
