#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace texp {

// Exact fixed-point cost: an integer numerator over a fixed 10^9 denominator.
// Objective weights enter as doubles once, get wrapped, and every comparison
// after that is integer-exact.
class Cost {
public:
    static constexpr std::int64_t denominator = 1'000'000'000;

    constexpr Cost() = default;

    static constexpr Cost from_raw(std::int64_t numerator) {
        Cost c;
        c.num_ = numerator;
        return c;
    }

    static Cost from_double(double v) {
        if (!std::isfinite(v))
            throw std::invalid_argument("cost must be finite");
        double scaled = std::round(v * static_cast<double>(denominator));
        if (std::abs(scaled) >= 9.0e18)
            throw std::overflow_error("cost out of range");
        return from_raw(static_cast<std::int64_t>(scaled));
    }

    constexpr std::int64_t raw() const { return num_; }
    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(denominator);
    }

    constexpr bool is_zero() const { return num_ == 0; }
    constexpr bool is_positive() const { return num_ > 0; }

    Cost& operator+=(Cost o) {
        if (__builtin_add_overflow(num_, o.num_, &num_))
            throw std::overflow_error("cost overflow");
        return *this;
    }
    Cost& operator-=(Cost o) {
        if (__builtin_sub_overflow(num_, o.num_, &num_))
            throw std::overflow_error("cost overflow");
        return *this;
    }
    friend Cost operator+(Cost a, Cost b) { return a += b; }
    friend Cost operator-(Cost a, Cost b) { return a -= b; }
    friend constexpr auto operator<=>(Cost a, Cost b) = default;

    std::string str() const { return std::to_string(to_double()); }

private:
    std::int64_t num_ = 0;
};

}  // namespace texp
