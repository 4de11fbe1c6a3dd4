#ifndef CLASSBOUND_ERROR_HPP
#define CLASSBOUND_ERROR_HPP

#include <stdexcept>
#include <string>

namespace classbound {

/// Broad failure classes. The CLI maps each one to its own exit code.
enum class ErrorKind {
    invalid_input,    // malformed or inconsistent user data
    io,               // missing / unreadable / unwritable files
    precision,        // working precision too low (root isolation, LLL, enclosures)
    arithmetic,       // mathematically impossible request (zero norm, p | lc, ...)
    unsupported,      // request outside what the tool can decide
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error invalid_input(const std::string& what) { return {ErrorKind::invalid_input, what}; }
inline Error io_error(const std::string& what) { return {ErrorKind::io, what}; }
inline Error precision_error(const std::string& what) { return {ErrorKind::precision, what}; }
inline Error arithmetic_error(const std::string& what) { return {ErrorKind::arithmetic, what}; }
inline Error unsupported(const std::string& what) { return {ErrorKind::unsupported, what}; }

inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_input: return 2;
    case ErrorKind::io: return 3;
    case ErrorKind::precision: return 4;
    case ErrorKind::arithmetic: return 5;
    case ErrorKind::unsupported: return 6;
    }
    return 1;
}

} // namespace classbound

#endif // CLASSBOUND_ERROR_HPP
