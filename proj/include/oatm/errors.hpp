#pragma once

#include <stdexcept>
#include <string>

namespace oatm {

// Violation of a documented precondition (caller bug).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

class PgmError : public std::runtime_error {
public:
    enum class Kind { MalformedHeader, UnsupportedMaxval, TruncatedPayload, Io };

    PgmError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class SingularTransformError : public std::runtime_error {
public:
    explicit SingularTransformError(const std::string& msg) : std::runtime_error(msg) {}
};

class DegenerateSubTemplateError : public std::runtime_error {
public:
    explicit DegenerateSubTemplateError(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyNetError : public std::runtime_error {
public:
    explicit EmptyNetError(const std::string& msg) : std::runtime_error(msg) {}
};

class InfeasibleSpecError : public std::runtime_error {
public:
    explicit InfeasibleSpecError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace oatm
