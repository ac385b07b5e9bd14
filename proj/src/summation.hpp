#pragma once

#include <cmath>

namespace sdpbound::detail {

// Neumaier-compensated running sum.
class NeumaierSum {
public:
    NeumaierSum& operator+=(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
        return *this;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace sdpbound::detail
