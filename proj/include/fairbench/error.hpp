#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fairbench {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV, model document, manifest, model artifact).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A reference to an identifier, column or attribute that does not exist.
class UnknownReferenceError : public Error {
public:
    UnknownReferenceError(std::string what_kind, std::string name)
        : Error("unknown " + what_kind + " '" + name + "'"), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// A configuration or experiment rejected by the feature-model constraints.
/// `violations` carries the user-facing messages in declaration order.
class ConstraintError : public Error {
public:
    explicit ConstraintError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& m : v) {
            if (!out.empty()) out += "; ";
            out += m;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

/// A learner asked to do something its capability table forbids.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// Arguments outside an operation's documented domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace fairbench
