#pragma once

#include <stdexcept>
#include <string>

namespace dlsim {

// Invalid user-supplied configuration. The message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dlsim
