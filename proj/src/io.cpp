#include "morphogrid/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "morphogrid/error.hpp"

namespace morphogrid {

namespace {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  for (auto& line : lines)
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return lines;
}

std::optional<double> parse_real(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

[[noreturn]] void parse_fail(const std::string& what, std::size_t line) {
  throw MorphoError(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Units parse_units(const std::string& name) {
  for (auto u : {Units::kRaw, Units::kTwoPoint, Units::kProcrustes})
    if (name == units_name(u)) return u;
  throw MorphoError(ErrorCode::kSchema, "unknown units tag '" + name + "'");
}

struct PendingRecord {
  std::size_t line = 0;
  std::vector<Point2> points;
  std::string id;
  double scale = 1.0;
};

}  // namespace

Sample parse_tps_file(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<PendingRecord> records;
  std::size_t expected = 0;

  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    const auto line = trim(lines[n]);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail("expected KEY=value, got '" + std::string(line) + "'", line_no);
    const std::string key = lower(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));

    if (key == "lm") {
      int k = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), k);
      if (ec != std::errc() || ptr != value.data() + value.size() || k < 1) {
        parse_fail("invalid landmark count '" + std::string(value) + "'", line_no);
      }
      if (!records.empty() && static_cast<std::size_t>(k) != expected) {
        parse_fail("record has LM=" + std::to_string(k) + " but earlier records have LM=" +
                       std::to_string(expected),
                   line_no);
      }
      expected = static_cast<std::size_t>(k);
      PendingRecord record;
      record.line = line_no;
      for (int i = 0; i < k; ++i) {
        ++n;
        if (n >= lines.size()) parse_fail("file ends inside a landmark block", line_no);
        const auto tokens = split_ws(lines[n]);
        if (tokens.size() != 2) {
          parse_fail("expected two coordinates, got " + std::to_string(tokens.size()) + " fields", n + 1);
        }
        const auto x = parse_real(tokens[0]);
        const auto y = parse_real(tokens[1]);
        if (!x || !y) parse_fail("invalid coordinate", n + 1);
        record.points.push_back({*x, *y});
      }
      records.push_back(std::move(record));
      continue;
    }
    if (records.empty()) parse_fail("'" + key + "=' before any LM= record", line_no);
    auto& current = records.back();
    if (key == "id") {
      current.id = std::string(value);
    } else if (key == "scale") {
      const auto s = parse_real(value);
      if (!s || !(*s > 0.0)) parse_fail("invalid SCALE '" + std::string(value) + "'", line_no);
      current.scale = *s;
    } else if (key == "curves") {
      if (value != "0") parse_fail("curve blocks are not supported", line_no);
    } else if (key == "image" || key == "comment" || key == "variables") {
      // descriptive only
    } else {
      parse_fail("unknown key '" + key + "'", line_no);
    }
  }
  if (records.empty()) throw MorphoError(ErrorCode::kParse, "no LM= records found");

  std::vector<LandmarkConfiguration> configs;
  std::map<std::string, std::size_t> seen;
  for (std::size_t r = 0; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.id.empty()) rec.id = "specimen" + std::to_string(r + 1);
    if (!seen.emplace(rec.id, rec.line).second) {
      parse_fail("duplicate ID '" + rec.id + "'", rec.line);
    }
    for (auto& p : rec.points) p = rec.scale * p;
    try {
      configs.push_back(LandmarkConfiguration::from_points(rec.id, rec.points));
    } catch (const MorphoError& e) {
      parse_fail(e.what(), rec.line);
    }
  }
  return Sample(std::move(configs));
}

Sample parse_csv(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t header_line = 0;
  while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
  if (header_line >= lines.size()) throw MorphoError(ErrorCode::kParse, "CSV input is empty");

  std::vector<std::string> header;
  for (auto field : split_commas(lines[header_line])) header.push_back(lower(field));
  if (header.empty() || header[0] != "id") {
    parse_fail("CSV header must start with 'id'", header_line + 1);
  }
  const bool has_group = header.size() > 1 && header[1] == "group";
  const std::size_t first = has_group ? 2 : 1;
  const std::vector<std::string> long_tail{"label", "x", "y"};
  const bool long_form = header.size() == first + 3 &&
                         std::equal(long_tail.begin(), long_tail.end(), header.begin() + first);
  std::size_t k = 0;
  if (!long_form) {
    const std::size_t coords = header.size() - first;
    if (coords < 2 || coords % 2 != 0) {
      parse_fail("header is neither id,label,x,y nor id,x1,y1,...,xk,yk", header_line + 1);
    }
    k = coords / 2;
    for (std::size_t i = 0; i < k; ++i) {
      if (header[first + 2 * i] != "x" + std::to_string(i + 1) ||
          header[first + 2 * i + 1] != "y" + std::to_string(i + 1)) {
        parse_fail("wide header expects x" + std::to_string(i + 1) + ",y" + std::to_string(i + 1) +
                       " at column " + std::to_string(first + 2 * i + 1),
                   header_line + 1);
      }
    }
  }

  struct Row {
    std::string id;
    std::string group;
    std::vector<Landmark> landmarks;
    std::size_t line = 0;
  };
  std::vector<Row> rows;
  std::map<std::string, std::size_t> index;

  for (std::size_t n = header_line + 1; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    if (trim(lines[n]).empty()) continue;
    const auto fields = split_commas(lines[n]);
    if (fields.size() != header.size()) {
      parse_fail("row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                     " fields, header has " + std::to_string(header.size()),
                 line_no);
    }
    const std::string id(fields[0]);
    if (id.empty()) parse_fail("row " + std::to_string(line_no) + " has an empty id", line_no);
    const std::string group = has_group ? std::string(fields[1]) : std::string{};
    auto read = [&](std::size_t col) {
      const auto v = parse_real(fields[col]);
      if (!v) {
        parse_fail("row " + std::to_string(line_no) + ": invalid number '" + std::string(fields[col]) +
                       "' in column " + header[col],
                   line_no);
      }
      return *v;
    };

    if (long_form) {
      auto [it, inserted] = index.emplace(id, rows.size());
      if (inserted) rows.push_back({id, group, {}, line_no});
      auto& row = rows[it->second];
      if (row.group != group) {
        parse_fail("row " + std::to_string(line_no) + ": specimen '" + id + "' changes group", line_no);
      }
      row.landmarks.push_back({std::string(fields[first]), {read(first + 1), read(first + 2)}});
    } else {
      if (!index.emplace(id, rows.size()).second) {
        parse_fail("row " + std::to_string(line_no) + ": duplicate id '" + id + "'", line_no);
      }
      Row row{id, group, {}, line_no};
      const auto labels = default_labels(k);
      for (std::size_t i = 0; i < k; ++i) {
        row.landmarks.push_back({labels[i], {read(first + 2 * i), read(first + 2 * i + 1)}});
      }
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) throw MorphoError(ErrorCode::kParse, "CSV has a header but no data rows");

  std::vector<LandmarkConfiguration> configs;
  std::map<std::string, std::string> groups;
  for (auto& row : rows) {
    try {
      configs.emplace_back(row.id, std::move(row.landmarks));
    } catch (const MorphoError& e) {
      parse_fail("row " + std::to_string(row.line) + ": " + e.what(), row.line);
    }
    if (!row.group.empty()) groups[row.id] = row.group;
  }
  return Sample(std::move(configs), std::move(groups));
}

std::string write_dataset(const Dataset& dataset) {
  const Sample& sample = dataset.sample;
  Json doc;
  doc["schema"] = dataset.schema_version;
  doc["landmarks"] = sample.labels();
  Json configs = Json::array();
  for (const auto& config : sample.configurations()) {
    Json coords = Json::array();
    for (const auto& p : config.points()) coords.push_back({p.x, p.y});
    Json entry;
    entry["id"] = config.name();
    entry["group"] = sample.group_of(config.name());
    entry["units"] = units_name(config.units());
    entry["coords"] = std::move(coords);
    configs.push_back(std::move(entry));
  }
  doc["configurations"] = std::move(configs);
  Json metadata = Json::object();
  for (const auto& [key, value] : sample.metadata()) metadata[key] = value;
  doc["metadata"] = std::move(metadata);
  doc["provenance"] = {{"sources", dataset.provenance.sources},
                       {"ingested", dataset.provenance.ingested}};
  return doc.dump(1) + "\n";
}

Dataset read_dataset(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw MorphoError(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("schema")) {
      throw MorphoError(ErrorCode::kSchema, "dataset is missing the 'schema' field");
    }
    const int schema = doc.at("schema").get<int>();
    if (schema != kSchemaVersion) {
      throw MorphoError(ErrorCode::kSchema, "dataset schema " + std::to_string(schema) +
                                                " does not match supported schema " +
                                                std::to_string(kSchemaVersion));
    }
    const auto labels = doc.at("landmarks").get<std::vector<std::string>>();
    std::vector<LandmarkConfiguration> configs;
    std::map<std::string, std::string> groups;
    std::size_t index = 0;
    for (const auto& entry : doc.at("configurations")) {
      ++index;
      const auto id = entry.at("id").get<std::string>();
      const auto& coords = entry.at("coords");
      if (coords.size() != labels.size()) {
        throw MorphoError(ErrorCode::kSchema, "configuration '" + id + "' has " +
                                                  std::to_string(coords.size()) + " points but " +
                                                  std::to_string(labels.size()) + " labels");
      }
      std::vector<Landmark> landmarks;
      for (std::size_t i = 0; i < coords.size(); ++i) {
        const auto& pair = coords[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          throw MorphoError(ErrorCode::kSchema, "configuration '" + id + "': point " +
                                                    std::to_string(i + 1) +
                                                    " must be a pair of finite numbers");
        }
        landmarks.push_back({labels[i], {pair[0].get<double>(), pair[1].get<double>()}});
      }
      const Units units =
          entry.contains("units") ? parse_units(entry.at("units").get<std::string>()) : Units::kRaw;
      configs.emplace_back(id, std::move(landmarks), units);
      const auto group = entry.value("group", std::string{});
      if (!group.empty()) groups[id] = group;
    }
    std::map<std::string, std::string> metadata;
    if (doc.contains("metadata")) {
      for (const auto& [key, value] : doc.at("metadata").items()) metadata[key] = value.get<std::string>();
    }
    Dataset dataset;
    dataset.schema_version = schema;
    dataset.sample = Sample(std::move(configs), std::move(groups), std::move(metadata));
    if (doc.contains("provenance")) {
      const auto& prov = doc.at("provenance");
      dataset.provenance.sources = prov.value("sources", std::vector<std::string>{});
      dataset.provenance.ingested = prov.value("ingested", std::string{});
    }
    return dataset;
  } catch (const Json::exception& e) {
    throw MorphoError(ErrorCode::kSchema, std::string("dataset does not match the schema: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MorphoError(ErrorCode::kInvalidArgument, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MorphoError(ErrorCode::kInvalidArgument, "cannot write '" + path.string() + "'");
  out << text;
}

Dataset load_dataset(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  const std::string text = read_text_file(path);
  if (ext == ".json") return read_dataset(text);
  Dataset dataset;
  if (ext == ".tps") {
    dataset.sample = parse_tps_file(text);
  } else if (ext == ".csv") {
    dataset.sample = parse_csv(text);
  } else {
    throw MorphoError(ErrorCode::kInvalidArgument,
                      "unrecognized input extension '" + ext + "' (expected .tps, .csv or .json)");
  }
  dataset.provenance.sources.push_back(path.string());
  return dataset;
}

}  // namespace morphogrid
