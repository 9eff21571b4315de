#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace gpfewshot::jsonout {

/// Doubles rendered with 12 significant digits, '.' decimal separator.
std::string format_g12(double value);

/// Order-preserving JSON value with byte-stable serialization; numeric
/// output goes through format_g12 so reports are reproducible bit for bit.
class Value {
 public:
  static Value object();
  static Value array();
  static Value str(std::string s);
  static Value num(double v);
  static Value integer(long long v);
  static Value uinteger(std::uint64_t v);
  static Value boolean(bool b);

  Value& add(const std::string& key, Value v);  // object members, in order
  Value& push(Value v);                          // array elements

  std::string dump() const;                      // compact
  std::string dump_pretty(int indent = 2) const;

 private:
  enum class Kind { Object, Array, String, Number, Integer, UInteger, Boolean };
  Kind kind_ = Kind::Object;
  std::string string_;
  double number_ = 0.0;
  long long integer_ = 0;
  std::uint64_t uinteger_ = 0;
  bool boolean_ = false;
  std::vector<std::pair<std::string, Value>> members_;
  std::vector<Value> elements_;

  void write(std::string& out, int indent, int depth) const;
};

/// Writes through a temporary file in the same directory plus rename, so
/// readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace gpfewshot::jsonout
