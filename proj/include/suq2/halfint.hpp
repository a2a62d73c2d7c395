#pragma once

#include <compare>
#include <cstdlib>
#include <functional>
#include <string>

namespace suq2 {

/// Exact element of ½ℤ, stored as twice its value.
class HalfInt {
public:
    constexpr HalfInt() = default;
    constexpr explicit HalfInt(int value) : twice_(2 * value) {}

    static constexpr HalfInt from_twice(int twice) {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }

    constexpr int twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr double value() const { return 0.5 * twice_; }

    /// Integer value; only meaningful when is_integer().
    constexpr int as_int() const { return twice_ / 2; }

    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
    constexpr HalfInt operator*(int k) const { return from_twice(twice_ * k); }
    constexpr HalfInt& operator+=(HalfInt o) { twice_ += o.twice_; return *this; }
    constexpr HalfInt& operator-=(HalfInt o) { twice_ -= o.twice_; return *this; }

    constexpr auto operator<=>(const HalfInt&) const = default;

    /// "3/2", "-1/2", "2".
    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

private:
    int twice_ = 0;
};

constexpr HalfInt abs(HalfInt h) { return HalfInt::from_twice(h.twice() < 0 ? -h.twice() : h.twice()); }

inline constexpr HalfInt kHalf = HalfInt::from_twice(1);

} // namespace suq2

template <>
struct std::hash<suq2::HalfInt> {
    std::size_t operator()(suq2::HalfInt h) const noexcept { return std::hash<int>{}(h.twice()); }
};
