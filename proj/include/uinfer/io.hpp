#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace uinfer {

// Floats in every emitted file go through this: 17 significant digits,
// enough to round-trip an IEEE double exactly.
std::string float17(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Deterministic JSON emitter. Keys are written in call order and doubles
// through float17, so identical inputs give identical bytes; nlohmann's
// dump() would reformat numbers, which is why writing goes through this
// while parsing uses nlohmann.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v);
  JsonWriter& value(double v);
  JsonWriter& value(int64_t v);
  JsonWriter& value(uint64_t v);
  JsonWriter& value(int v);
  JsonWriter& value(bool v);
  JsonWriter& kv(std::string_view k, std::string_view v) { return key(k).value(v); }
  JsonWriter& kv(std::string_view k, const char* v) { return key(k).value(v); }
  JsonWriter& kv(std::string_view k, double v) { return key(k).value(v); }
  JsonWriter& kv(std::string_view k, int64_t v) { return key(k).value(v); }
  JsonWriter& kv(std::string_view k, uint64_t v) { return key(k).value(v); }
  JsonWriter& kv(std::string_view k, int v) { return key(k).value(v); }
  JsonWriter& kv(std::string_view k, bool v) { return key(k).value(v); }

  const std::string& str() const { return out_; }

  static std::string escape(std::string_view s);

 private:
  void pre_value();
  std::string out_;
  std::vector<bool> need_comma_;
  bool pending_key_ = false;
};

}  // namespace uinfer
