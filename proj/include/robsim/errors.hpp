#pragma once

#include <stdexcept>
#include <string>

namespace robsim {

/// Base for all robsim failures. `name()` is the stable identifier printed
/// on stderr by the CLI and used to select the process exit code.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// numerical failures (CLI exit code 3)
struct NonConvergence : Error {
    NonConvergence(const std::string& what, double residual, int iters)
        : Error("NonConvergence", what), residual(residual), iters(iters) {}
    double residual;
    int iters;
};
struct IncompatibleRHS : Error {
    explicit IncompatibleRHS(const std::string& what) : Error("IncompatibleRHS", what) {}
};
struct SingularCorrection : Error {
    explicit SingularCorrection(const std::string& what) : Error("SingularCorrection", what) {}
};
struct CFLViolation : Error {
    explicit CFLViolation(const std::string& what) : Error("CFLViolation", what) {}
};
struct InvalidAlpha : Error {
    explicit InvalidAlpha(const std::string& what) : Error("InvalidAlpha", what) {}
};
struct InsufficientData : Error {
    explicit InsufficientData(const std::string& what) : Error("InsufficientData", what) {}
};
struct SpecMismatch : Error {
    explicit SpecMismatch(const std::string& what) : Error("SpecMismatch", what) {}
};

// configuration failures (CLI exit code 2)
struct ParseError : Error {
    ParseError(const std::string& what, int line = 0)
        : Error("ParseError", line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line(line) {}
    int line;
};
struct ValidationError : Error {
    ValidationError(const std::string& key, const std::string& reason)
        : Error("ValidationError", key + ": " + reason), key(key) {}
    std::string key;
};
struct NonMonotoneTime : Error {
    explicit NonMonotoneTime(const std::string& what) : Error("NonMonotoneTime", what) {}
};

// I/O failures (CLI exit code 4)
struct IoError : Error {
    explicit IoError(const std::string& what) : Error("IoError", what) {}
};

} // namespace robsim
