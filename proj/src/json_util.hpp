#pragma once

// Strict JSON reading helpers shared by the file-format modules.

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include "avcert/errors.hpp"
#include "json.hpp"

namespace avcert::detail {

using Json = nlohmann::ordered_json;

inline Json parse_document(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "malformed JSON");
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, "cannot write file");
  out << text;
}

/// View of a JSON object at a known pointer; every accessor reports the
/// pointer of the offending member.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(display(), "expected an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!allowed.count(it.key())) throw ParseError(path_ + "/" + it.key(), "unknown key");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const Json& at(const char* key) const {
    if (!j_.contains(key)) throw ParseError(child(key), "missing required key");
    return j_.at(key);
  }

  double number(const char* key) const {
    const Json& v = at(key);
    if (!v.is_number()) throw ParseError(child(key), "expected a number");
    return v.get<double>();
  }
  double number_or(const char* key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  long long integer(const char* key) const {
    const Json& v = at(key);
    if (!v.is_number_integer()) throw ParseError(child(key), "expected an integer");
    return v.get<long long>();
  }

  std::string string(const char* key) const {
    const Json& v = at(key);
    if (!v.is_string()) throw ParseError(child(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string_or(const char* key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  bool boolean(const char* key) const {
    const Json& v = at(key);
    if (!v.is_boolean()) throw ParseError(child(key), "expected a boolean");
    return v.get<bool>();
  }

  const Json& array(const char* key) const {
    const Json& v = at(key);
    if (!v.is_array()) throw ParseError(child(key), "expected an array");
    return v;
  }

  ObjectReader object(const char* key) const { return ObjectReader(at(key), child(key)); }

  std::string child(const std::string& key) const { return path_ + "/" + key; }
  const std::string& path() const { return path_; }

 private:
  std::string display() const { return path_.empty() ? "/" : path_; }

  const Json& j_;
  std::string path_;
};

}  // namespace avcert::detail
