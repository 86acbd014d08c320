// Exception hierarchy shared by every qgerbe module.
//
// All library failures derive from qgerbe::Error so callers (the CLI in
// particular) can separate input/usage problems from check failures.
#pragma once

#include <stdexcept>
#include <string>

namespace qgerbe {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unknown chart label or missing keyed entry.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Argument outside the operation's domain (empty region, bad counts, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A cochain or form lacks an entry required by the requested operation.
class IncompleteDataError : public Error {
public:
    using Error::Error;
};

class DivergentIntegralError : public Error {
public:
    using Error::Error;
};

/// Times are not strictly increasing where the construction requires it.
class TimeOrderError : public Error {
public:
    using Error::Error;
};

/// sin(omega*dt) vanishes: the harmonic kernel is singular there.
class CausticError : public Error {
public:
    using Error::Error;
};

/// cos(omega*dt) vanishes (tangent pole) or a reciprocal of zero was requested.
class PoleError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class VanishingModulusError : public Error {
public:
    using Error::Error;
};

/// Oriented boundaries that were expected to match do not.
class BoundaryMismatchError : public Error {
public:
    using Error::Error;
};

/// Operation applied to the wrong kind of object (e.g. a volume with boundary).
class WrongOperationError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario / serialized input.
class SchemaError : public Error {
public:
    using Error::Error;
};

} // namespace qgerbe
