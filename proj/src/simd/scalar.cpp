#include "nngtl/simd.hpp"

namespace nngtl::simd
{
    namespace
    {
        Nearest nearest_scalar (const double *xs, const double *ys, std::size_t n, double qx, double qy)
        {
            Nearest best{0, 0.0};
            for (std::size_t i = 0; i < n; ++i)
            {
                const double dx = xs[i] - qx;
                const double dy = ys[i] - qy;
                const double d2 = dx * dx + dy * dy;
                if (i == 0 || d2 < best.d2)
                    best = {i, d2};
            }
            return best;
        }

        void within_scalar (const double *xs, const double *ys, std::size_t n, double qx, double qy, double r2, std::uint32_t base, std::vector<std::uint32_t> &out)
        {
            for (std::size_t i = 0; i < n; ++i)
            {
                const double dx = xs[i] - qx;
                const double dy = ys[i] - qy;
                if (dx * dx + dy * dy <= r2)
                    out.push_back (base + static_cast<std::uint32_t> (i));
            }
        }

        void min_sq_distance_scalar (const double *px, const double *py, std::size_t m, const double *xs, const double *ys, std::size_t n, double *out)
        {
            for (std::size_t j = 0; j < m; ++j)
            {
                double best = out[j];
                for (std::size_t i = 0; i < n; ++i)
                {
                    const double dx = px[j] - xs[i];
                    const double dy = py[j] - ys[i];
                    const double d2 = dx * dx + dy * dy;
                    best = d2 < best ? d2 : best;
                }
                out[j] = best;
            }
        }
    } // namespace

    const Kernels &scalar_kernels () noexcept
    {
        static const Kernels k{nearest_scalar, within_scalar, min_sq_distance_scalar};
        return k;
    }

} // namespace nngtl::simd
