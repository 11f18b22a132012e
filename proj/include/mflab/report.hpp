#pragma once

#include "mflab/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mflab {

// Insertion-ordered JSON tree with fixed floating formatting (17 significant
// digits), so identical runs serialize byte-identically.
class JsonValue {
 public:
  enum class Kind { Object, Array, String, Number, Integer, Bool, Null };

  JsonValue() : kind_(Kind::Null) {}
  static JsonValue object() { return JsonValue(Kind::Object); }
  static JsonValue array() { return JsonValue(Kind::Array); }
  static JsonValue string(std::string s);
  static JsonValue number(double v);
  static JsonValue integer(long long v);
  static JsonValue boolean(bool v);
  static JsonValue complex_number(Complex v);  // {"re": ..., "im": ...}

  JsonValue& set(const std::string& key, JsonValue v);  // object append
  JsonValue& push(JsonValue v);                         // array append

  static std::string format_double(double v);
  std::string dump(int indent = 2) const;

 private:
  explicit JsonValue(Kind k) : kind_(k) {}
  void dump_to(std::string& out, int indent, int depth) const;

  Kind kind_;
  std::vector<std::pair<std::string, JsonValue>> members_;
  std::vector<JsonValue> items_;
  std::string str_;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

void write_text_file(const std::string& path, const std::string& content);

// CSV with %.17g cells and a fixed header row.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  void add_row_numeric(const std::vector<double>& cells);
  std::string str() const { return text_; }

 private:
  std::string text_;
  size_t columns_;
};

}  // namespace mflab
