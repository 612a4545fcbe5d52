#pragma once

#include <stdexcept>
#include <string>

namespace sponsored {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unknown question, signal, state or advertiser label, or an index out of range.
class LookupError : public Error {
public:
    using Error::Error;
};

/// A posterior was requested for a signal with marginal probability zero.
class ZeroMeasureSignal : public Error {
public:
    using Error::Error;
};

/// A per-advertiser vector has the wrong length.
class ArityError : public Error {
public:
    using Error::Error;
};

/// Bids or generator parameters outside their admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed rational literal or document.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace sponsored
