#include "sln/errors.hpp"

namespace sln {

const char* errc_name(errc code) noexcept {
    switch (code) {
    case errc::duplicate_account: return "DuplicateAccount";
    case errc::account_not_found: return "AccountNotFound";
    case errc::not_asset_owner: return "NotAssetOwner";
    case errc::double_spend: return "DoubleSpend";
    case errc::publisher_halted: return "PublisherHalted";
    case errc::illegal_transition: return "IllegalTransition";
    case errc::link_not_found: return "LinkNotFound";
    case errc::process_not_found: return "ProcessNotFound";
    case errc::object_not_found: return "ObjectNotFound";
    case errc::duplicate_request: return "DuplicateRequest";
    case errc::session_not_found: return "SessionNotFound";
    case errc::wrong_phase: return "WrongPhase";
    case errc::insufficient_trustiness: return "InsufficientTrustiness";
    case errc::insufficient_responsibility: return "InsufficientResponsibility";
    case errc::missing_previous_location: return "MissingPreviousLocation";
    case errc::verification_failed: return "VerificationFailed";
    case errc::bad_identifier: return "BadIdentifier";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

} // namespace sln
