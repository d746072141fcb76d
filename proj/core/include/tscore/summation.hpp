#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace tscore
{

// Neumaier's variant of Kahan summation.
class CompensatedSum
{
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
        {
            comp_ += (sum_ - t) + x;
        }
        else
        {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    void merge(const CompensatedSum& other) noexcept
    {
        add(other.sum_);
        add(other.comp_);
    }

    [[nodiscard]] auto value() const noexcept -> double { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Fixed fan-in of the reduction tree. Partial sums over consecutive chunks of
// this many terms are merged left to right, so the result is identical for
// any thread count.
inline constexpr std::size_t kReductionChunk = 4096;

auto compensated_sum(std::span<const double> values) -> double;

// Sums term(i) for i in [0, count) with the chunked compensated tree,
// evaluating chunks on up to `threads` workers.
auto deterministic_sum(std::size_t count, const std::function<double(std::size_t)>& term,
                       unsigned threads = 1) -> double;

}  // namespace tscore
