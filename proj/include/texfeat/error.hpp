#pragma once

#include <stdexcept>
#include <string>

namespace texfeat {

/// Base for every error raised by the library. The CLI maps these to exit
/// code 2 (input/usage problems); anything else is treated as internal.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class DatasetError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class DegenerateImageError : public Error {
public:
    using Error::Error;
};

class StatisticsError : public Error {
public:
    using Error::Error;
};

class SplitError : public Error {
public:
    using Error::Error;
};

class ConfigMismatchError : public Error {
public:
    using Error::Error;
};

}  // namespace texfeat
