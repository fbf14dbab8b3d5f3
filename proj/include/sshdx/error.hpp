#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>

namespace sshdx {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input is rank deficient, has zero rows/columns where forbidden, or similar.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// An exhaustive enumeration would exceed the configured budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// The operation is undefined on this input (e.g. trivial cohomology).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid scalar parameter (bad group order, non-symmetric generator set, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A structural invariant failed while assembling an object.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// A check that holds by construction failed; indicates a bug, not bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ": line " + std::to_string(line) + ": " + what), line_(line), detail_(what), file_(file) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::string& file() const noexcept { return file_; }

    ParseError in_file(const std::string& file) const { return ParseError(file, line_, detail_); }

private:
    std::size_t line_;
    std::string detail_;
    std::string file_;
};

/// An error raised inside a named pipeline stage; `cause` holds the original.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what, std::exception_ptr cause)
        : Error(stage + ": " + what), stage_(std::move(stage)), cause_(std::move(cause)) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    std::string stage_;
    std::exception_ptr cause_;
};

/// Default cap on the number of elements any exhaustive enumeration may visit.
inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;

inline void require_budget(std::uint64_t needed, std::uint64_t budget, const std::string& what) {
    if (needed > budget) {
        throw ResourceError(what + ": enumeration of " + std::to_string(needed) +
                            " elements exceeds budget " + std::to_string(budget));
    }
}

/// 2^e saturated to UINT64_MAX.
inline std::uint64_t pow2_saturated(std::size_t e) {
    return e >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << e);
}

}  // namespace sshdx
