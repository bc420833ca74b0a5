#include "abe/run_record.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace abe {

void Manifest::set(std::string key, std::string value) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const auto& e) { return e.first == key; });
  if (it != entries_.end()) {
    it->second = std::move(value);
  } else {
    entries_.emplace_back(std::move(key), std::move(value));
  }
}

void Manifest::set(std::string key, double value) { set(std::move(key), format_real(value)); }

std::optional<std::string> Manifest::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string Manifest::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

}  // namespace abe
