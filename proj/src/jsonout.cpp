#include "gpfewshot/jsonout.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace gpfewshot::jsonout {

std::string format_g12(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

Value Value::object() {
  Value v;
  v.kind_ = Kind::Object;
  return v;
}

Value Value::array() {
  Value v;
  v.kind_ = Kind::Array;
  return v;
}

Value Value::str(std::string s) {
  Value v;
  v.kind_ = Kind::String;
  v.string_ = std::move(s);
  return v;
}

Value Value::num(double d) {
  Value v;
  v.kind_ = Kind::Number;
  v.number_ = d;
  return v;
}

Value Value::integer(long long i) {
  Value v;
  v.kind_ = Kind::Integer;
  v.integer_ = i;
  return v;
}

Value Value::uinteger(std::uint64_t u) {
  Value v;
  v.kind_ = Kind::UInteger;
  v.uinteger_ = u;
  return v;
}

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Boolean;
  v.boolean_ = b;
  return v;
}

Value& Value::add(const std::string& key, Value v) {
  members_.emplace_back(key, std::move(v));
  return *this;
}

Value& Value::push(Value v) {
  elements_.push_back(std::move(v));
  return *this;
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

void newline_indent(std::string& out, int indent, int depth) {
  if (indent <= 0) return;
  out += '\n';
  out.append(static_cast<size_t>(indent) * depth, ' ');
}

}  // namespace

void Value::write(std::string& out, int indent, int depth) const {
  switch (kind_) {
    case Kind::String:
      escape_into(out, string_);
      break;
    case Kind::Number:
      out += format_g12(number_);
      break;
    case Kind::Integer:
      out += std::to_string(integer_);
      break;
    case Kind::UInteger:
      out += std::to_string(uinteger_);
      break;
    case Kind::Boolean:
      out += boolean_ ? "true" : "false";
      break;
    case Kind::Object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : members_) {
        if (!first) out += ',';
        first = false;
        newline_indent(out, indent, depth + 1);
        escape_into(out, key);
        out += indent > 0 ? ": " : ":";
        value.write(out, indent, depth + 1);
      }
      if (!members_.empty()) newline_indent(out, indent, depth);
      out += '}';
      break;
    }
    case Kind::Array: {
      out += '[';
      bool first = true;
      for (const auto& value : elements_) {
        if (!first) out += ',';
        first = false;
        newline_indent(out, indent, depth + 1);
        value.write(out, indent, depth + 1);
      }
      if (!elements_.empty()) newline_indent(out, indent, depth);
      out += ']';
      break;
    }
  }
}

std::string Value::dump() const {
  std::string out;
  write(out, 0, 0);
  return out;
}

std::string Value::dump_pretty(int indent) const {
  std::string out;
  write(out, indent, 0);
  out += '\n';
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace gpfewshot::jsonout
