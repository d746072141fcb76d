#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tscore
{

// 0 means "all hardware threads".
inline auto resolve_threads(unsigned requested) noexcept -> unsigned
{
    if (requested != 0)
    {
        return requested;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count) on up to `threads` workers with a static
// interleaved schedule. The first exception thrown by any body is rethrown.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
    const std::size_t workers =
        std::min<std::size_t>(resolve_threads(threads), count);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            body(i);
        }
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back([&, w] {
            try
            {
                for (std::size_t i = w; i < count; i += workers)
                {
                    body(i);
                }
            }
            catch (...)
            {
                const std::scoped_lock lock(failure_mutex);
                if (!failure)
                {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
    {
        t.join();
    }
    if (failure)
    {
        std::rethrow_exception(failure);
    }
}

}  // namespace tscore
