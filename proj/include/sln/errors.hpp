#pragma once

#include <stdexcept>
#include <string>

namespace sln {

// Machine-readable failure codes. The CLI maps these to exit status 3
// (domain) or 4 (I/O) and prints the code name verbatim.
enum class errc {
    duplicate_account,
    account_not_found,
    not_asset_owner,
    double_spend,
    publisher_halted,
    illegal_transition,
    link_not_found,
    process_not_found,
    object_not_found,
    duplicate_request,
    session_not_found,
    wrong_phase,
    insufficient_trustiness,
    insufficient_responsibility,
    missing_previous_location,
    verification_failed,
    bad_identifier,
    invalid_argument,
    parse_error,
    io_error,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

} // namespace sln
