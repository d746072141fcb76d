#pragma once

#include <stdexcept>
#include <string>

namespace tscore
{

// Malformed or inconsistent input data (files, panels). Preconditions on
// arguments are reported with std::invalid_argument instead.
class DataError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tscore
