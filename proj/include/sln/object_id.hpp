#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sln {

// An asset identifier: a base object ID plus a dot-separated suffix path.
// Each transfer hop extends the suffix with the receiving account, so the
// full ID records the route the object took ("d.v1.v2"). Account and base
// IDs therefore must not contain '.'.
//
// Stored as the rendered string plus a separator count. Suffix paths grow
// with chain length, so keeping one contiguous buffer makes copies a single
// allocation instead of one per hop. Constructors validate every segment;
// a constructed ID is always well-formed, which is what lets the ledger
// trust segment counts without re-walking the path on each publish.
class ObjectId {
public:
    ObjectId() = default;
    explicit ObjectId(std::string base_id);
    ObjectId(std::string base_id, const std::vector<std::string>& suffix);

    static ObjectId parse(const std::string& rendered);

    // The rendered "base.seg1.seg2..." form; valid as long as this object.
    const std::string& str() const { return repr_; }

    std::string_view base() const {
        const std::size_t dot = repr_.find('.');
        return std::string_view(repr_).substr(0, dot);
    }

    std::size_t path_size() const { return dots_; }
    bool path_empty() const { return dots_ == 0; }

    // The final suffix element; must not be called on a bare base ID.
    std::string_view last_segment() const {
        return std::string_view(repr_).substr(repr_.rfind('.') + 1);
    }

    // All suffix elements in hop order.
    std::vector<std::string_view> segments() const;

    ObjectId extended(std::string_view node) const;

    // The ID with the last suffix element removed; nullopt for a bare base.
    std::optional<ObjectId> parent() const {
        if (dots_ == 0) return std::nullopt;
        return ObjectId(Raw{}, repr_.substr(0, repr_.rfind('.')), dots_ - 1);
    }

    bool operator==(const ObjectId& other) const { return repr_ == other.repr_; }

private:
    struct Raw {};
    ObjectId(Raw, std::string repr, std::uint32_t dots) : repr_(std::move(repr)), dots_(dots) {}

    std::string repr_;
    std::uint32_t dots_ = 0;
};

// Validates a single account or base-object identifier segment.
void check_identifier(std::string_view id, const char* what);

} // namespace sln
