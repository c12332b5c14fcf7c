#include "sln/object_id.hpp"

#include "sln/errors.hpp"

namespace sln {

void check_identifier(std::string_view id, const char* what) {
    if (id.empty()) fail(errc::bad_identifier, std::string(what) + " must not be empty");
    for (char c : id) {
        if (c == '.' || c == '\n' || c == '\r' || c == '\0')
            fail(errc::bad_identifier, std::string(what) + " '" + std::string(id) +
                                           "' contains a reserved character");
    }
}

ObjectId::ObjectId(std::string base_id) : repr_(std::move(base_id)) {
    check_identifier(repr_, "object");
}

ObjectId::ObjectId(std::string base_id, const std::vector<std::string>& suffix)
    : repr_(std::move(base_id)), dots_(static_cast<std::uint32_t>(suffix.size())) {
    check_identifier(repr_, "object");
    std::size_t total = repr_.size();
    for (const std::string& node : suffix) total += 1 + node.size();
    repr_.reserve(total);
    for (const std::string& node : suffix) {
        check_identifier(node, "asset path element");
        repr_ += '.';
        repr_ += node;
    }
}

ObjectId ObjectId::parse(const std::string& rendered) {
    std::uint32_t dots = 0;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = rendered.find('.', start);
        const std::size_t end = dot == std::string::npos ? rendered.size() : dot;
        if (end == start) fail(errc::parse_error, "empty segment in object ID '" + rendered + "'");
        check_identifier(std::string_view(rendered).substr(start, end - start),
                         start == 0 ? "object" : "asset path element");
        if (dot == std::string::npos) break;
        ++dots;
        start = dot + 1;
    }
    return ObjectId(Raw{}, rendered, dots);
}

std::vector<std::string_view> ObjectId::segments() const {
    std::vector<std::string_view> out;
    out.reserve(dots_);
    const std::string_view repr(repr_);
    std::size_t pos = repr.find('.');
    while (pos != std::string_view::npos) {
        const std::size_t next = repr.find('.', pos + 1);
        out.push_back(repr.substr(pos + 1, next == std::string_view::npos ? next : next - pos - 1));
        pos = next;
    }
    return out;
}

ObjectId ObjectId::extended(std::string_view node) const {
    check_identifier(node, "asset path element");
    std::string repr;
    repr.reserve(repr_.size() + 1 + node.size());
    repr += repr_;
    repr += '.';
    repr += node;
    return ObjectId(Raw{}, std::move(repr), dots_ + 1);
}

} // namespace sln
