#ifndef DR_ERRORS_HPP
#define DR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dr {

// Invalid input (bad graph, incompatible ramification vector, ...).
// Maps to CLI exit code 2.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A certified computation failed its own validation (interpolation holdout
// mismatch, fit degree exhausted). Maps to CLI exit code 3.
class CertificationError : public std::runtime_error {
public:
    explicit CertificationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dr

#endif
