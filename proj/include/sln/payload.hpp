#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "sln/sln_model.hpp"

namespace sln {

// What a transaction carries. Link-state publishes use Link; the root issue
// of an object uses Bootstrap; Rule/Shortcut/Score transactions annotate
// the chain rather than transfer the asset.
enum class TxKind { Bootstrap, Link, Rule, Shortcut, Score };

const char* tx_kind_name(TxKind k) noexcept;
std::optional<TxKind> parse_tx_kind(const std::string& name) noexcept;

/**
 * The free-form payload of a transaction. Serialized as a canonical
 * key-sorted "key=value" text block (one pair per line, '%'-escaped), so
 * equal payloads always hash identically:
 *
 *   attr.<key>=<value>   (attributes, sorted by key)
 *   kind=LINK
 *   link=<link id>       (omitted when empty)
 *   state=<state name>   (omitted when absent)
 *   time=<logical timestamp>
 *   type=<link type>     (omitted when empty)
 */
struct TagPayload {
    TxKind kind = TxKind::Link;
    std::string link_id;
    std::string link_type;
    std::optional<LinkState> state;
    std::map<std::string, std::string> attributes;
    std::uint64_t timestamp = 0;   // logical counter, stamped by the ledger

    std::string canonical_text() const;
    static TagPayload parse(const std::string& text);

    bool operator==(const TagPayload&) const = default;
};

std::string percent_encode(const std::string& raw);
std::string percent_decode(const std::string& encoded);

} // namespace sln
