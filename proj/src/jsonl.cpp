#include "ldwb/jsonl.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "ldwb/error.hpp"
#include "ldwb/text.hpp"

namespace ldwb::jsonl {

std::vector<Line> read(std::istream& in, std::string_view schema, std::string_view source) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  bool header_seen = false;
  const std::string where(source);
  while (std::getline(in, raw)) {
    ++number;
    if (text::trim(raw).empty()) continue;
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw DataError(where, number, std::string("malformed record: ") + e.what());
    }
    if (!value.is_object()) throw DataError(where, number, "malformed record: expected an object");
    if (!header_seen) {
      header_seen = true;
      auto s = value.find("schema");
      auto v = value.find("version");
      if (s == value.end() || !s->is_string() || v == value.end() || !v->is_number_integer() ||
          value.size() != 2) {
        throw DataError(where, number, "missing schema header line");
      }
      if (s->get<std::string>() != schema) {
        throw DataError(where, number,
                        "schema mismatch: expected '" + std::string(schema) + "', found '" +
                            s->get<std::string>() + "'");
      }
      if (v->get<int>() != kSchemaVersion) {
        throw DataError(where, number, "unsupported schema version " + std::to_string(v->get<int>()));
      }
      continue;
    }
    lines.push_back({number, std::move(value)});
  }
  if (!header_seen) throw DataError(where + ": empty file (missing schema header line)");
  return lines;
}

std::vector<Line> read_file(const std::filesystem::path& path, std::string_view schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read(in, schema, path.string());
}

void write_header(std::ostream& out, std::string_view schema) {
  json h;
  h["schema"] = schema;
  h["version"] = kSchemaVersion;
  out << h.dump() << '\n';
}

void write_line(std::ostream& out, const json& value) { out << value.dump() << '\n'; }

Record::Record(const json& value, std::string_view source, std::size_t line)
    : value_(value), source_(source), line_(line) {
  if (!value_.is_object()) fail("expected an object");
}

void Record::fail(const std::string& message) const { throw DataError(source_, line_, message); }

void Record::only_keys(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [key, _] : value_.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail("unexpected field '" + key + "'");
  }
}

bool Record::has(std::string_view key) const { return value_.contains(std::string(key)); }

const json& Record::at(std::string_view key) const {
  auto it = value_.find(std::string(key));
  if (it == value_.end()) fail("missing field '" + std::string(key) + "'");
  return *it;
}

std::string Record::string(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_string()) fail("field '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::string Record::non_empty_string(std::string_view key) const {
  auto s = string(key);
  if (text::trim(s).empty()) fail("field '" + std::string(key) + "' must be non-empty");
  return s;
}

double Record::number(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_number()) fail("field '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

long long Record::integer(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_number_integer()) fail("field '" + std::string(key) + "' must be an integer");
  return v.get<long long>();
}

const json& Record::array(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_array()) fail("field '" + std::string(key) + "' must be an array");
  return v;
}

const json& Record::object(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_object()) fail("field '" + std::string(key) + "' must be an object");
  return v;
}

}  // namespace ldwb::jsonl
