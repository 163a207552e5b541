#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "ddah/nn.hpp"

namespace ddah {

/// Magic string at offset 0 of every model file. See docs/formats.md.
inline constexpr std::string_view kModelMagic = "DDAH1";

void save_model(std::ostream& out, const Network& net);
Network load_model(std::istream& in);

void save_model(const std::filesystem::path& path, const Network& net);
Network load_model(const std::filesystem::path& path);

}  // namespace ddah
