#pragma once

#include <charconv>
#include <cmath>
#include <span>
#include <string>

namespace foresight {

// Neumaier-compensated running sum.
class compensated_sum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double accurate_sum(std::span<const double> xs) noexcept {
    compensated_sum s;
    for (double x : xs) s.add(x);
    return s.value();
}

inline double positive_part(double x) noexcept { return x > 0.0 ? x : 0.0; }

// Shortest decimal that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace foresight
