#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "xflie/lsg/graph.hpp"

namespace xflie::lsg {

inline constexpr int kSchemaVersion = 1;

/// Graph document (`.lsg.json`). Field order is fixed so documents diff
/// cleanly; doubles are written in shortest round-trip form.
std::string serialize(const LayeredSemanticGraph& g);

/// Throws Error(SchemaVersionMismatch) or Error(MalformedDocument).
LayeredSemanticGraph deserialize(std::string_view document);

void save(const LayeredSemanticGraph& g, const std::filesystem::path& path);
LayeredSemanticGraph load(const std::filesystem::path& path);

}  // namespace xflie::lsg
