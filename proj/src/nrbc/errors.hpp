#pragma once

#include <stdexcept>
#include <string>

namespace nrbc {

enum class ErrorKind {
    Domain = 1,
    Accuracy = 2,
    Convergence = 3,
    Config = 4,
    Integration = 5,
    Io = 6,
    Resolution = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::Domain, w) {}
};
struct AccuracyError : Error {
    explicit AccuracyError(const std::string& w) : Error(ErrorKind::Accuracy, w) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& w) : Error(ErrorKind::Convergence, w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};
struct IntegrationError : Error {
    explicit IntegrationError(const std::string& w) : Error(ErrorKind::Integration, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};
struct ResolutionError : Error {
    explicit ResolutionError(const std::string& w) : Error(ErrorKind::Resolution, w) {}
};

}  // namespace nrbc
