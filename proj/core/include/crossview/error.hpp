#pragma once

#include <stdexcept>
#include <string>

namespace crossview {

/// Error type for all data and geometry failures in the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crossview
