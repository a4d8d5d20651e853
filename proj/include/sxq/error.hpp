#pragma once

#include <stdexcept>
#include <string>

namespace sxq {

// All library failures surface as Error with a category tag so callers (and
// the negative-path tests) can distinguish unsupported features from bad input.
class Error : public std::runtime_error {
public:
    enum class Kind {
        Syntax,        // malformed input text
        Unsupported,   // feature outside the implemented subset
        Conflict,      // inconsistent query (e.g. variable type conflict)
        Mapping,       // missing/ambiguous catalog information
        Internal,
        Eval,          // dynamic error while evaluating a query
    };

    Error(Kind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline Error syntaxError(const std::string& msg, size_t pos) {
    return Error(Error::Kind::Syntax, msg + " at offset " + std::to_string(pos));
}

} // namespace sxq
