#pragma once

#include <stdexcept>
#include <string>

namespace dskg {

// Failure classes map onto CLI exit codes: config=2, numerical=3, non-convergence=4.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

struct nonconvergence_error : std::runtime_error {
    explicit nonconvergence_error(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of a kernel/operator.
struct domain_error : numerical_error {
    explicit domain_error(const std::string& what) : numerical_error(what) {}
};

}  // namespace dskg
