#pragma once

#include <stdexcept>
#include <string>

namespace cjm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, grids, masks or experiment definitions.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A kernel failed inside an execution engine.
class BackendError : public Error {
public:
    using Error::Error;
};

/// An iterative procedure ran out of budget before meeting its target.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cjm
