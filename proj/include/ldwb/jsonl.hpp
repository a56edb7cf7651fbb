#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ldwb::jsonl {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Every line-delimited file starts with {"schema": "<name>", "version": N}.
struct Line {
  std::size_t number = 0;  // 1-based, header included
  json value;
};

// Reads a schema-versioned file. Blank lines are skipped; every other line
// must be a JSON object.
std::vector<Line> read(std::istream& in, std::string_view schema, std::string_view source);
std::vector<Line> read_file(const std::filesystem::path& path, std::string_view schema);

void write_header(std::ostream& out, std::string_view schema);
void write_line(std::ostream& out, const json& value);

// Typed, line-aware access to one record. All failures throw DataError
// carrying the source name and line number.
class Record {
 public:
  Record(const json& value, std::string_view source, std::size_t line);

  [[noreturn]] void fail(const std::string& message) const;

  // Rejects keys outside `allowed`.
  void only_keys(std::initializer_list<std::string_view> allowed) const;

  bool has(std::string_view key) const;
  const json& at(std::string_view key) const;
  std::string string(std::string_view key) const;
  std::string non_empty_string(std::string_view key) const;
  double number(std::string_view key) const;
  long long integer(std::string_view key) const;
  const json& array(std::string_view key) const;
  const json& object(std::string_view key) const;

  Record child(const json& value) const { return Record(value, source_, line_); }
  std::size_t line() const { return line_; }
  const json& value() const { return value_; }

 private:
  const json& value_;
  std::string source_;
  std::size_t line_;
};

}  // namespace ldwb::jsonl
