#include "snowball/ids.hpp"

#include <stdexcept>

namespace snowball {

NodeId IdTable::intern(std::string_view external) {
    if (auto it = internals_.find(external); it != internals_.end()) {
        return it->second;
    }
    const auto id = node_at(static_cast<std::uint32_t>(externals_.size()));
    externals_.emplace_back(external);
    internals_.emplace(externals_.back(), id);
    return id;
}

std::optional<NodeId> IdTable::find(std::string_view external) const {
    if (auto it = internals_.find(external); it != internals_.end()) {
        return it->second;
    }
    return std::nullopt;
}

const std::string& IdTable::external(NodeId id) const {
    if (index_of(id) >= externals_.size()) {
        throw std::out_of_range("IdTable: unknown internal id " + std::to_string(index_of(id)));
    }
    return externals_[index_of(id)];
}

void IdTable::reserve(std::size_t n) {
    internals_.reserve(n);
    externals_.reserve(n);
}

} // namespace snowball
