#include "nngtl/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace nngtl::simd
{
#ifndef NNGTL_HAVE_AVX2
    const Kernels *avx2_kernels () noexcept
    {
        return nullptr;
    }
#endif

    bool cpu_has_avx2 () noexcept
    {
#if defined(__x86_64__) || defined(__i386__)
        return __builtin_cpu_supports ("avx2");
#else
        return false;
#endif
    }

    namespace
    {
        Backend detect () noexcept
        {
            if (const char *env = std::getenv ("NNGTL_SIMD"); env && std::string_view (env) == "scalar")
                return Backend::Scalar;
            return cpu_has_avx2 () && avx2_kernels () ? Backend::Avx2 : Backend::Scalar;
        }

        std::atomic<int> &selected ()
        {
            static std::atomic<int> b{static_cast<int> (detect ())};
            return b;
        }
    } // namespace

    Backend active_backend () noexcept
    {
        return static_cast<Backend> (selected ().load (std::memory_order_relaxed));
    }

    const Kernels &active () noexcept
    {
        if (active_backend () == Backend::Avx2)
            return *avx2_kernels ();
        return scalar_kernels ();
    }

    void force_backend (Backend b) noexcept
    {
        if (b == Backend::Avx2 && !(cpu_has_avx2 () && avx2_kernels ()))
            b = Backend::Scalar;
        selected ().store (static_cast<int> (b), std::memory_order_relaxed);
    }

    const char *to_string (Backend b) noexcept
    {
        return b == Backend::Avx2 ? "avx2" : "scalar";
    }

} // namespace nngtl::simd
