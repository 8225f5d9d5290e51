#pragma once

#include <stdexcept>

namespace looptex {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input (PGM header, CSV, raw code-map sidecar).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Argument outside its documented domain (k, levels, sizes, lengths).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Linear-algebra failure, typically a singular system.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Dataset layout, fold plan or record pairing violation.
class DatasetError : public Error {
public:
    using Error::Error;
};

}  // namespace looptex
