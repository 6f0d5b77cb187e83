#pragma once

#include <stdexcept>
#include <string>

namespace qstat {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Count data with no usable mass.
class EmptyDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// All target values equal, so R² has no denominator.
class DegenerateVarianceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IncompatibleFitsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidDistributionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or invalid input file. The message carries line/field context.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A number with no textual reference in the lexicon.
class LexiconGapError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Transport or authentication failure while talking to a search backend.
class SearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qstat
