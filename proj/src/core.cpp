#include "nngtl/core.hpp"

#include <limits>
#include <numbers>

namespace nngtl
{
    const char *to_string (ErrorCode code) noexcept
    {
        switch (code)
        {
        case ErrorCode::ObstaclePoint: return "ObstaclePoint";
        case ErrorCode::NoFreeSpace: return "NoFreeSpace";
        case ErrorCode::GenerationFailed: return "GenerationFailed";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::EmptyCycle: return "EmptyCycle";
        case ErrorCode::EmptySuffix: return "EmptySuffix";
        case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
        case ErrorCode::NoFeasibleAccepting: return "NoFeasibleAccepting";
        case ErrorCode::NoPrefixFound: return "NoPrefixFound";
        case ErrorCode::Unsatisfiable: return "Unsatisfiable";
        case ErrorCode::NoPlanFound: return "NoPlanFound";
        case ErrorCode::NoRealizableRun: return "NoRealizableRun";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        }
        return "Unknown";
    }

    std::uint64_t Rng::below (std::uint64_t n)
    {
        if (n == 0)
            throw Error (ErrorCode::InvalidArgument, "Rng::below: empty range");
        // rejection sampling keeps the draw unbiased
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max () - std::numeric_limits<std::uint64_t>::max () % n;
        std::uint64_t v = 0;
        do
        {
            v = engine_ ();
        } while (v >= limit);
        return v % n;
    }

    double Rng::normal ()
    {
        const double u1 = uniform_open_closed ();
        const double u2 = uniform ();
        return std::sqrt (-2.0 * std::log (u1)) * std::cos (2.0 * std::numbers::pi * u2);
    }

    std::size_t Rng::weighted (const std::vector<double> &weights)
    {
        double total = 0.0;
        for (double w : weights)
            total += w;
        if (!(total > 0.0))
            throw Error (ErrorCode::InvalidArgument, "Rng::weighted: weights sum to zero");
        double u = uniform () * total;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size (); ++i)
        {
            if (weights[i] <= 0.0)
                continue;
            last_positive = i;
            if (u < weights[i])
                return i;
            u -= weights[i];
        }
        return last_positive;
    }

} // namespace nngtl
