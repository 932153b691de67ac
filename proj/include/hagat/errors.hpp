#pragma once

#include <stdexcept>
#include <string>

namespace hagat {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A caller-supplied argument is outside its documented domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// API misuse, e.g. calling backward on a non-scalar.
class ContractError : public Error {
public:
    using Error::Error;
};

/// A computation produced NaN or infinity.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Files are missing or malformed.
class IngestionError : public Error {
public:
    using Error::Error;
};

/// Files parse but their content violates a dataset invariant.
class DataError : public Error {
public:
    using Error::Error;
};

class UndefinedMeasureError : public Error {
public:
    using Error::Error;
};

class SplitError : public Error {
public:
    using Error::Error;
};

class PriorError : public Error {
public:
    using Error::Error;
};

/// A normalization denominator vanished. `node` names the offending node.
class DegenerateWeightsError : public Error {
public:
    DegenerateWeightsError(const std::string& what, long node) : Error(what), node(node) {}
    long node;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, int epoch) : Error(what), epoch(epoch) {}
    int epoch;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace hagat
