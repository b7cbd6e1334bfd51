#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "morphogrid/core.hpp"

namespace morphogrid {

inline constexpr int kSchemaVersion = 1;

struct Provenance {
  std::vector<std::string> sources;
  std::string ingested;  // ISO-8601 UTC, empty when unknown

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Canonical on-disk form consumed by every analysis command.
struct Dataset {
  int schema_version = kSchemaVersion;
  Sample sample;
  Provenance provenance;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// TPS landmark records: `LM=<k>` then k coordinate lines, optionally
/// followed by `ID=`, `SCALE=`, `IMAGE=`, `COMMENT=` lines. SCALE multiplies
/// the record's coordinates. Unnamed records become specimen1, specimen2...
Sample parse_tps_file(std::string_view text);

/// Long form `id,label,x,y` (one row per landmark) or wide form
/// `id,x1,y1,...,xk,yk` (one row per specimen). An optional `group` column
/// may follow `id` in either form.
Sample parse_csv(std::string_view text);

/// `{schema, landmarks, configurations: [{id, group, units, coords}],
/// metadata, provenance}`. Doubles are written in shortest round-trip form,
/// so read_dataset(write_dataset(d)) == d bit for bit.
std::string write_dataset(const Dataset& dataset);
Dataset read_dataset(std::string_view json_text);

/// Dispatches on extension: .tps, .csv, .json.
Dataset load_dataset(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace morphogrid
