#include "mflab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mflab {

JsonValue JsonValue::string(std::string s) {
  JsonValue v(Kind::String);
  v.str_ = std::move(s);
  return v;
}

JsonValue JsonValue::number(double d) {
  JsonValue v(Kind::Number);
  v.num_ = d;
  return v;
}

JsonValue JsonValue::integer(long long i) {
  JsonValue v(Kind::Integer);
  v.int_ = i;
  return v;
}

JsonValue JsonValue::boolean(bool b) {
  JsonValue v(Kind::Bool);
  v.bool_ = b;
  return v;
}

JsonValue JsonValue::complex_number(Complex c) {
  JsonValue v = object();
  v.set("re", number(c.real()));
  v.set("im", number(c.imag()));
  return v;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
  members_.emplace_back(key, std::move(v));
  return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
  items_.push_back(std::move(v));
  return *this;
}

std::string JsonValue::format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void pad(std::string& out, int indent, int depth) {
  if (indent > 0) {
    out += '\n';
    out.append(static_cast<size_t>(indent) * depth, ' ');
  }
}

}  // namespace

void JsonValue::dump_to(std::string& out, int indent, int depth) const {
  switch (kind_) {
    case Kind::Null: out += "null"; return;
    case Kind::Bool: out += bool_ ? "true" : "false"; return;
    case Kind::Integer: out += std::to_string(int_); return;
    case Kind::Number: out += format_double(num_); return;
    case Kind::String: escape_into(out, str_); return;
    case Kind::Array: {
      if (items_.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ',';
        pad(out, indent, depth + 1);
        items_[i].dump_to(out, indent, depth + 1);
      }
      pad(out, indent, depth);
      out += ']';
      return;
    }
    case Kind::Object: {
      if (members_.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      for (size_t i = 0; i < members_.size(); ++i) {
        if (i) out += ',';
        pad(out, indent, depth + 1);
        escape_into(out, members_[i].first);
        out += indent > 0 ? ": " : ":";
        members_[i].second.dump_to(out, indent, depth + 1);
      }
      pad(out, indent, depth);
      out += '}';
      return;
    }
  }
}

std::string JsonValue::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  out += '\n';
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path);
  out << content;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

void CsvWriter::add_row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> out;
  out.reserve(cells.size());
  for (double c : cells) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    out.emplace_back(buf);
  }
  add_row(out);
}

}  // namespace mflab
