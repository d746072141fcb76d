#include "tscore/summation.hpp"

#include <algorithm>
#include <vector>

#include "tscore/parallel.hpp"

namespace tscore
{

auto compensated_sum(std::span<const double> values) -> double
{
    return deterministic_sum(values.size(), [values](std::size_t i) { return values[i]; });
}

auto deterministic_sum(std::size_t count, const std::function<double(std::size_t)>& term,
                       unsigned threads) -> double
{
    const std::size_t chunks = (count + kReductionChunk - 1) / kReductionChunk;
    std::vector<CompensatedSum> partial(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::size_t begin = c * kReductionChunk;
        const std::size_t end = std::min(count, begin + kReductionChunk);
        CompensatedSum acc;
        for (std::size_t i = begin; i < end; ++i)
        {
            acc.add(term(i));
        }
        partial[c] = acc;
    });

    CompensatedSum total;
    for (const auto& p : partial)
    {
        total.merge(p);
    }
    return total.value();
}

}  // namespace tscore
