#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace snowball {

/// Dense internal node identifier (0..n-1), stable for the lifetime of a run.
enum class NodeId : std::uint32_t {};

constexpr std::uint32_t index_of(NodeId id) noexcept { return static_cast<std::uint32_t>(id); }
constexpr NodeId node_at(std::uint32_t index) noexcept { return static_cast<NodeId>(index); }

/// Bidirectional mapping between external string ids and dense internal ids.
/// Ids are handed out in first-seen order.
class IdTable {
public:
    NodeId intern(std::string_view external);
    std::optional<NodeId> find(std::string_view external) const;
    const std::string& external(NodeId id) const;

    std::size_t size() const noexcept { return externals_.size(); }
    void reserve(std::size_t n);

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_map<std::string, NodeId, Hash, std::equal_to<>> internals_;
    std::vector<std::string> externals_;
};

} // namespace snowball
