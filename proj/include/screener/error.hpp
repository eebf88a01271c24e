#pragma once

#include <stdexcept>
#include <string>

namespace screener {

// Base for every error the engine raises on purpose. Catch this at
// process boundaries (CLI, HTTP handlers); inside the engine catch the
// concrete type you can actually handle.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace screener
