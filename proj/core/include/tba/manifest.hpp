#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tba/recorder.hpp"

namespace tba {

/// Recording manifest as a single JSON document: header, chunks with
/// base64 payloads, chain digests hex, receipts.
std::string manifest_to_json(const Recording& rec);
Recording manifest_from_json(std::string_view json_text);

void save_manifest(const Recording& rec, const std::filesystem::path& path);
Recording load_manifest(const std::filesystem::path& path);

}  // namespace tba
