#include "sln/payload.hpp"

#include <array>
#include <charconv>

#include "sln/errors.hpp"

namespace sln {

const char* tx_kind_name(TxKind k) noexcept {
    switch (k) {
    case TxKind::Bootstrap: return "BOOTSTRAP";
    case TxKind::Link: return "LINK";
    case TxKind::Rule: return "RULE";
    case TxKind::Shortcut: return "SHORTCUT";
    case TxKind::Score: return "SCORE";
    }
    return "?";
}

std::optional<TxKind> parse_tx_kind(const std::string& name) noexcept {
    for (TxKind k : {TxKind::Bootstrap, TxKind::Link, TxKind::Rule, TxKind::Shortcut, TxKind::Score})
        if (name == tx_kind_name(k)) return k;
    return std::nullopt;
}

std::string percent_encode(const std::string& raw) {
    static const char digits[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(raw.size());
    for (unsigned char c : raw) {
        if (c == '%' || c == '=' || c == '\n' || c == '\r') {
            out.push_back('%');
            out.push_back(digits[c >> 4]);
            out.push_back(digits[c & 0x0f]);
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::string percent_decode(const std::string& encoded) {
    auto hex_val = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    std::string out;
    out.reserve(encoded.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        if (encoded[i] == '%') {
            if (i + 2 >= encoded.size()) fail(errc::parse_error, "bad escape in payload");
            int hi = hex_val(encoded[i + 1]), lo = hex_val(encoded[i + 2]);
            if (hi < 0 || lo < 0) fail(errc::parse_error, "bad escape in payload");
            out.push_back(static_cast<char>(hi * 16 + lo));
            i += 2;
        } else {
            out.push_back(encoded[i]);
        }
    }
    return out;
}

std::string TagPayload::canonical_text() const {
    std::string out;
    for (const auto& [key, value] : attributes) {
        out += "attr.";
        out += percent_encode(key);
        out += '=';
        out += percent_encode(value);
        out += '\n';
    }
    out += "kind=";
    out += tx_kind_name(kind);
    out += '\n';
    if (!link_id.empty()) {
        out += "link=";
        out += percent_encode(link_id);
        out += '\n';
    }
    if (state) {
        out += "state=";
        out += link_state_name(*state);
        out += '\n';
    }
    out += "time=";
    out += std::to_string(timestamp);
    out += '\n';
    if (!link_type.empty()) {
        out += "type=";
        out += percent_encode(link_type);
        out += '\n';
    }
    return out;
}

TagPayload TagPayload::parse(const std::string& text) {
    TagPayload tag;
    tag.kind = TxKind::Link;
    bool saw_kind = false;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(start, nl - start);
        start = nl + 1;
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(errc::parse_error, "payload line without '='");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key.rfind("attr.", 0) == 0) {
            tag.attributes[percent_decode(key.substr(5))] = percent_decode(value);
        } else if (key == "kind") {
            auto k = parse_tx_kind(value);
            if (!k) fail(errc::parse_error, "unknown payload kind '" + value + "'");
            tag.kind = *k;
            saw_kind = true;
        } else if (key == "link") {
            tag.link_id = percent_decode(value);
        } else if (key == "state") {
            auto s = parse_link_state(value);
            if (!s) fail(errc::parse_error, "unknown link state '" + value + "'");
            tag.state = *s;
        } else if (key == "time") {
            std::uint64_t ts = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), ts);
            if (ec != std::errc() || p != value.data() + value.size())
                fail(errc::parse_error, "bad timestamp '" + value + "'");
            tag.timestamp = ts;
        } else if (key == "type") {
            tag.link_type = percent_decode(value);
        } else {
            fail(errc::parse_error, "unknown payload key '" + key + "'");
        }
    }
    if (!saw_kind) fail(errc::parse_error, "payload missing kind");
    return tag;
}

} // namespace sln
