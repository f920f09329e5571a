#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "tgm/channel_registry.hpp"
#include "tgm/error.hpp"
#include "tgm/types.hpp"

namespace tgm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::BadField: return "BadField";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NotAPerson: return "NotAPerson";
    case ErrorCode::NonPositiveBinWidth: return "NonPositiveBinWidth";
    case ErrorCode::NoVisibleEdges: return "NoVisibleEdges";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::NotInjective: return "NotInjective";
    case ErrorCode::EmptyMapping: return "EmptyMapping";
    case ErrorCode::AlreadyMatched: return "AlreadyMatched";
    case ErrorCode::TargetTaken: return "TargetTaken";
    case ErrorCode::UnknownPair: return "UnknownPair";
    case ErrorCode::PairRejected: return "PairRejected";
    case ErrorCode::IncompatibleRegistry: return "IncompatibleRegistry";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {
constexpr std::array<std::pair<NodeKind, std::string_view>, 6> kKindNames{{
    {NodeKind::Person, "Person"},
    {NodeKind::Document, "Document"},
    {NodeKind::Demographic, "Demographic"},
    {NodeKind::Country, "Country"},
    {NodeKind::Item, "Item"},
    {NodeKind::Unknown, "Unknown"},
}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}
}  // namespace

std::string_view to_string(NodeKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (iequals(name, text)) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

ChannelRegistry ChannelRegistry::defaults() {
  return ChannelRegistry({"author", "sell", "buy", "financial", "phone", "email", "procurement"});
}

ChannelRegistry::ChannelRegistry(std::vector<std::string> codes) : codes_(std::move(codes)) {
  if (codes_.size() > ChannelSet::kMaxChannels) {
    throw Error(ErrorCode::InvalidConfig, "channel registry holds at most 64 codes");
  }
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    const auto& c = codes_[i];
    if (c.empty() || !std::all_of(c.begin(), c.end(), [](char ch) {
          return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
        })) {
      throw Error(ErrorCode::InvalidConfig, "channel code must be short lowercase text: '" + c + "'");
    }
    if (std::find(codes_.begin(), codes_.begin() + static_cast<std::ptrdiff_t>(i), c) !=
        codes_.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw Error(ErrorCode::InvalidConfig, "duplicate channel code '" + c + "'");
    }
  }
}

std::optional<ChannelId> ChannelRegistry::find(std::string_view code) const {
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    if (codes_[i] == code) return static_cast<ChannelId>(i);
  }
  return std::nullopt;
}

ChannelId ChannelRegistry::require(std::string_view code) const {
  if (auto id = find(code)) return *id;
  throw Error(ErrorCode::UnknownChannel, "unknown channel '" + std::string(code) + "'");
}

}  // namespace tgm
