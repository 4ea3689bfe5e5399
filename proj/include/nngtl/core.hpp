#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nngtl
{
    enum class ErrorCode
    {
        ObstaclePoint,
        NoFreeSpace,
        GenerationFailed,
        SyntaxError,
        EmptyCycle,
        EmptySuffix,
        UnsupportedFeature,
        NoFeasibleAccepting,
        NoPrefixFound,
        Unsatisfiable,
        NoPlanFound,
        NoRealizableRun,
        DimensionMismatch,
        FormatError,
        InvalidArgument,
    };

    const char *to_string (ErrorCode code) noexcept;

    /// Base exception for every failure reported by the library.
    class Error : public std::runtime_error
    {
      public:
        Error (ErrorCode code, const std::string &what) : std::runtime_error (what), code_ (code) {}
        [[nodiscard]] ErrorCode code () const noexcept { return code_; }

      private:
        ErrorCode code_;
    };

    /// Parse failure with a byte offset (or line number for line-oriented formats)
    /// and the set of tokens that would have been accepted.
    class SyntaxError : public Error
    {
      public:
        SyntaxError (std::size_t position, std::vector<std::string> expected, const std::string &what)
            : Error (ErrorCode::SyntaxError, what), position_ (position), expected_ (std::move (expected))
        {
        }
        [[nodiscard]] std::size_t position () const noexcept { return position_; }
        [[nodiscard]] const std::vector<std::string> &expected () const noexcept { return expected_; }

      private:
        std::size_t position_;
        std::vector<std::string> expected_;
    };

    /// Position in the unit-square workspace.
    struct Point
    {
        double x = 0.0;
        double y = 0.0;

        friend bool operator== (const Point &, const Point &) = default;
    };

    inline double distance (const Point &a, const Point &b) noexcept
    {
        return std::hypot (a.x - b.x, a.y - b.y);
    }

    /// Grid cell coordinates: `col` indexes x, `row` indexes y.
    struct Cell
    {
        int col = 0;
        int row = 0;

        friend auto operator<=> (const Cell &, const Cell &) = default;
    };

    /// One letter of a word over the labels: 0 is the empty set, i > 0 is {l_i}.
    /// Labels are mutually exclusive, so a letter never carries more than one.
    struct Symbol
    {
        int label = 0;

        [[nodiscard]] bool empty () const noexcept { return label == 0; }
        friend auto operator<=> (const Symbol &, const Symbol &) = default;
    };

    using Word = std::vector<Symbol>;

    /// Seeded random source. Distributions are implemented on top of the raw
    /// engine output so that draws are identical across standard libraries.
    class Rng
    {
      public:
        explicit Rng (std::uint64_t seed) : engine_ (seed) {}

        std::uint64_t next_u64 () { return engine_ (); }

        /// Uniform on [0, 1).
        double uniform () { return static_cast<double> (engine_ () >> 11) * 0x1.0p-53; }

        /// Uniform on (0, 1].
        double uniform_open_closed () { return 1.0 - uniform (); }

        double uniform (double lo, double hi) { return lo + (hi - lo) * uniform (); }

        /// Uniform integer on [0, n). Requires n > 0.
        std::uint64_t below (std::uint64_t n);

        /// Uniform integer on [lo, hi].
        int between (int lo, int hi) { return lo + static_cast<int> (below (static_cast<std::uint64_t> (hi - lo) + 1)); }

        bool bernoulli (double p) { return uniform () < p; }

        /// Standard normal via Box-Muller (one value per call).
        double normal ();

        /// Index drawn with probability proportional to `weights`; weights must be
        /// non-negative with a positive sum.
        std::size_t weighted (const std::vector<double> &weights);

      private:
        std::mt19937_64 engine_;
    };

} // namespace nngtl
