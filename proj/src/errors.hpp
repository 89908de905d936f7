#pragma once

#include <stdexcept>
#include <string>

namespace dymforge {

// Base class for every error raised by the engine. The C API maps these
// onto status codes; everything else surfaces as DYM_ERR_INTERNAL.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NotAMonomialError : public Error {
public:
    explicit NotAMonomialError(const std::string& what) : Error(what) {}
};

class NotAPerfectPowerError : public Error {
public:
    explicit NotAPerfectPowerError(const std::string& what) : Error(what) {}
};

class ExponentConstraintError : public Error {
public:
    explicit ExponentConstraintError(const std::string& what) : Error(what) {}
};

class BelowPrecisionError : public Error {
public:
    explicit BelowPrecisionError(const std::string& what) : Error(what) {}
};

class EmptyWindowError : public Error {
public:
    explicit EmptyWindowError(const std::string& what) : Error(what) {}
};

class InsufficientFamilyError : public Error {
public:
    explicit InsufficientFamilyError(const std::string& what) : Error(what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

class NonFiniteStateError : public Error {
public:
    explicit NonFiniteStateError(const std::string& what) : Error(what) {}
};

class LenardChainBrokenError : public Error {
public:
    explicit LenardChainBrokenError(const std::string& what) : Error(what) {}
};

class NotProportionalError : public Error {
public:
    explicit NotProportionalError(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace dymforge
