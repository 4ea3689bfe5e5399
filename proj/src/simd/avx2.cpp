#include "nngtl/simd.hpp"

#include <immintrin.h>

namespace nngtl::simd
{
    namespace
    {
        inline __m256d sq_dist (__m256d x, __m256d y, __m256d qx, __m256d qy)
        {
            const __m256d dx = _mm256_sub_pd (x, qx);
            const __m256d dy = _mm256_sub_pd (y, qy);
            return _mm256_add_pd (_mm256_mul_pd (dx, dx), _mm256_mul_pd (dy, dy));
        }

        Nearest nearest_avx2 (const double *xs, const double *ys, std::size_t n, double qx, double qy)
        {
            const __m256d vqx = _mm256_set1_pd (qx);
            const __m256d vqy = _mm256_set1_pd (qy);
            std::size_t i = 0;
            Nearest best{0, 0.0};
            bool have = false;
            if (n >= 4)
            {
                __m256d best_d = sq_dist (_mm256_loadu_pd (xs), _mm256_loadu_pd (ys), vqx, vqy);
                __m256d best_i = _mm256_set_pd (3.0, 2.0, 1.0, 0.0);
                __m256d idx = best_i;
                const __m256d four = _mm256_set1_pd (4.0);
                for (i = 4; i + 4 <= n; i += 4)
                {
                    idx = _mm256_add_pd (idx, four);
                    const __m256d d = sq_dist (_mm256_loadu_pd (xs + i), _mm256_loadu_pd (ys + i), vqx, vqy);
                    const __m256d lt = _mm256_cmp_pd (d, best_d, _CMP_LT_OQ);
                    best_d = _mm256_blendv_pd (best_d, d, lt);
                    best_i = _mm256_blendv_pd (best_i, idx, lt);
                }
                alignas (32) double lane_d[4];
                alignas (32) double lane_i[4];
                _mm256_store_pd (lane_d, best_d);
                _mm256_store_pd (lane_i, best_i);
                best = {static_cast<std::size_t> (lane_i[0]), lane_d[0]};
                for (int k = 1; k < 4; ++k)
                {
                    const auto li = static_cast<std::size_t> (lane_i[k]);
                    if (lane_d[k] < best.d2 || (lane_d[k] == best.d2 && li < best.index))
                        best = {li, lane_d[k]};
                }
                have = true;
            }
            for (; i < n; ++i)
            {
                const double dx = xs[i] - qx;
                const double dy = ys[i] - qy;
                const double d2 = dx * dx + dy * dy;
                if (!have || d2 < best.d2)
                {
                    best = {i, d2};
                    have = true;
                }
            }
            return best;
        }

        void within_avx2 (const double *xs, const double *ys, std::size_t n, double qx, double qy, double r2, std::uint32_t base, std::vector<std::uint32_t> &out)
        {
            const __m256d vqx = _mm256_set1_pd (qx);
            const __m256d vqy = _mm256_set1_pd (qy);
            const __m256d vr2 = _mm256_set1_pd (r2);
            std::size_t i = 0;
            for (; i + 4 <= n; i += 4)
            {
                const __m256d d = sq_dist (_mm256_loadu_pd (xs + i), _mm256_loadu_pd (ys + i), vqx, vqy);
                int mask = _mm256_movemask_pd (_mm256_cmp_pd (d, vr2, _CMP_LE_OQ));
                while (mask)
                {
                    const int k = __builtin_ctz (static_cast<unsigned> (mask));
                    out.push_back (base + static_cast<std::uint32_t> (i + static_cast<std::size_t> (k)));
                    mask &= mask - 1;
                }
            }
            for (; i < n; ++i)
            {
                const double dx = xs[i] - qx;
                const double dy = ys[i] - qy;
                if (dx * dx + dy * dy <= r2)
                    out.push_back (base + static_cast<std::uint32_t> (i));
            }
        }

        void min_sq_distance_avx2 (const double *px, const double *py, std::size_t m, const double *xs, const double *ys, std::size_t n, double *out)
        {
            // four query points per pass, broadcasting each source point
            std::size_t j = 0;
            for (; j + 4 <= m; j += 4)
            {
                const __m256d qx = _mm256_loadu_pd (px + j);
                const __m256d qy = _mm256_loadu_pd (py + j);
                __m256d best = _mm256_loadu_pd (out + j);
                for (std::size_t i = 0; i < n; ++i)
                {
                    const __m256d d = sq_dist (qx, qy, _mm256_set1_pd (xs[i]), _mm256_set1_pd (ys[i]));
                    best = _mm256_min_pd (d, best);
                }
                _mm256_storeu_pd (out + j, best);
            }
            for (; j < m; ++j)
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

    const Kernels *avx2_kernels () noexcept
    {
        static const Kernels k{nearest_avx2, within_avx2, min_sq_distance_avx2};
        return &k;
    }

} // namespace nngtl::simd
