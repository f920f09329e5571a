#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

namespace tgm {

/// External node identifier as it appears in input files.
struct NodeId {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

enum class NodeKind : std::uint8_t { Person, Document, Demographic, Country, Item, Unknown };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);

/// Dense channel number assigned by a ChannelRegistry.
using ChannelId = std::uint16_t;

enum class Direction : std::uint8_t { Forward, Backward };

std::string_view to_string(Direction d);

/// Set of channels from one registry. Registries hold at most 64 codes.
class ChannelSet {
 public:
  static constexpr std::size_t kMaxChannels = 64;

  constexpr ChannelSet() = default;
  constexpr explicit ChannelSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr ChannelSet first_n(std::size_t n) {
    return ChannelSet(n >= kMaxChannels ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  constexpr bool contains(ChannelId c) const { return c < kMaxChannels && (bits_ >> c) & 1U; }
  constexpr void insert(ChannelId c) { bits_ |= std::uint64_t{1} << c; }
  constexpr void erase(ChannelId c) { bits_ &= ~(std::uint64_t{1} << c); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool subset_of(ChannelSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr std::uint64_t bits() const { return bits_; }

  friend constexpr bool operator==(ChannelSet, ChannelSet) = default;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
      fn(static_cast<ChannelId>(std::countr_zero(b)));
    }
  }

 private:
  std::uint64_t bits_ = 0;
};

}  // namespace tgm

template <>
struct std::hash<tgm::NodeId> {
  std::size_t operator()(tgm::NodeId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};
