#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dapip {

enum class ApiFamily : std::uint8_t { Regex, Lookup, Transform };

std::string_view to_string(ApiFamily family);
std::optional<ApiFamily> parse_family(std::string_view name);

/// Index into the API catalog.
struct ApiId {
  std::uint16_t value = 0;
  auto operator<=>(const ApiId&) const = default;
};

struct ApiSpec {
  ApiId id;
  std::string name;
  ApiFamily family;
  std::string description;
};

/// The 135-entry catalog in stable order: 18 lookup, 13 transform, then 104
/// regex functions, each family in the order of the published listing.
std::span<const ApiSpec> api_catalog();

const ApiSpec& api_spec(ApiId id);

/// Catalog entries of one family (or all), in catalog order.
std::vector<ApiId> list_apis(std::optional<ApiFamily> family = std::nullopt);

/// Resolves a canonical name or one of the accepted aliases (GetCity,
/// GetState, GetFirstNum, ...).
std::optional<ApiId> find_api(std::string_view name);

/// find_api that throws UnknownApi.
ApiId api_by_name(std::string_view name);

}  // namespace dapip
