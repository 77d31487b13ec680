#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <string_view>

#include "hydrate/error.hpp"
#include "json.hpp"

namespace hydrate::detail {

inline void reject_unknown_keys(const nlohmann::ordered_json& j,
                                std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  if (!j.is_object()) {
    throw Error(ErrorKind::invalid_argument, where + " must be a JSON object");
  }
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw Error(ErrorKind::invalid_argument, "unknown key '" + item.key() + "' in " + where);
    }
  }
}

}  // namespace hydrate::detail
