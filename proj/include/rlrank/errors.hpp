#pragma once

#include <stdexcept>
#include <string>

namespace rlrank {

// Problems caused by user-supplied data or configuration (bad trace file,
// unknown experiment name, too few algorithms). The CLI maps these to exit
// code 2; everything else is an internal error (exit code 1).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rlrank
