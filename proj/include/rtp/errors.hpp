#pragma once

#include <stdexcept>
#include <string>

namespace rtp {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rtp
