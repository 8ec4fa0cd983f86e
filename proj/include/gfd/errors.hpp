#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gfd {

// Exit-code categories used by the CLI (see tools/): 2 = bad input,
// 3 = build failure, 4 = verification failure.
enum class ErrorKind : int {
    input = 2,
    build = 3,
    verify = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct UnsupportedFieldWidth : Error {
    explicit UnsupportedFieldWidth(unsigned k)
        : Error(ErrorKind::input, "unsupported field width k=" + std::to_string(k) + " (need 1..64)") {}
};

struct DivisionByZero : Error {
    DivisionByZero() : Error(ErrorKind::input, "division by zero in GF(2^k)") {}
};

struct DimensionMismatch : Error {
    DimensionMismatch(std::size_t a, std::size_t b)
        : Error(ErrorKind::input,
                "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct DuplicateKey : Error {
    explicit DuplicateKey(const std::string& what)
        : Error(ErrorKind::input, "duplicate key with conflicting values: " + what) {}
};

struct ValueOutOfRange : Error {
    ValueOutOfRange(std::uint64_t v, unsigned k)
        : Error(ErrorKind::input,
                "value " + std::to_string(v) + " does not fit in " + std::to_string(k) + " bits") {}
};

struct EmptyRange : Error {
    EmptyRange() : Error(ErrorKind::input, "hash range must be nonzero") {}
};

struct EmptyTrial : Error {
    EmptyTrial() : Error(ErrorKind::input, "trial count must be nonzero") {}
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& msg) : Error(ErrorKind::input, msg) {}
};

// Every attempt produced an unsolvable system (or a hash stage ran out of
// candidates). `stage` names the level that gave up.
struct BuildFailed : Error {
    BuildFailed(const std::string& stage, unsigned attempts)
        : Error(ErrorKind::build,
                "build failed at stage '" + stage + "' after " + std::to_string(attempts) +
                    " attempt(s)"),
          stage(stage),
          attempts(attempts) {}
    std::string stage;
    unsigned attempts;
};

struct FileFormatError : Error {
    explicit FileFormatError(const std::string& msg)
        : Error(ErrorKind::input, "dictionary file: " + msg) {}
};

struct NotAMembershipFilter : Error {
    NotAMembershipFilter()
        : Error(ErrorKind::input, "dictionary file has no MEMB section (not a membership filter)") {}
};

}  // namespace gfd
