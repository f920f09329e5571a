#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgm/types.hpp"

namespace tgm {

// Ordered set of channel codes. A code's position is its ChannelId.
class ChannelRegistry {
 public:
  /// author, sell, buy, financial, phone, email, procurement
  static ChannelRegistry defaults();

  ChannelRegistry() = default;
  // Throws InvalidConfig on duplicates, non-lowercase codes, or more than 64 codes.
  explicit ChannelRegistry(std::vector<std::string> codes);

  std::optional<ChannelId> find(std::string_view code) const;
  // Throws UnknownChannel.
  ChannelId require(std::string_view code) const;

  const std::string& code(ChannelId id) const { return codes_.at(id); }
  std::size_t size() const { return codes_.size(); }
  std::span<const std::string> codes() const { return codes_; }
  ChannelSet all() const { return ChannelSet::first_n(codes_.size()); }

  friend bool operator==(const ChannelRegistry&, const ChannelRegistry&) = default;

 private:
  std::vector<std::string> codes_;
};

}  // namespace tgm
