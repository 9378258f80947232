#pragma once

// Monte-Carlo sample statistics shared by the estimator modules.

#include <cmath>
#include <cstdint>

namespace cbs {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
};

struct McAccumulator {
    double sum = 0.0, sum2 = 0.0;
    std::uint64_t n = 0;

    void add(double v)
    {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    void merge(const McAccumulator& o)
    {
        sum += o.sum;
        sum2 += o.sum2;
        n += o.n;
    }
    McEstimate estimate() const
    {
        McEstimate e;
        e.n_samples = n;
        e.mean = sum / double(n);
        e.std_error = std::sqrt(std::fmax(0.0, sum2 / double(n) - e.mean * e.mean) / double(n));
        return e;
    }
};

} // namespace cbs
