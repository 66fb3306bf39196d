#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "clickboost/types.hpp"

namespace clickboost::serial {

// Shortest decimal string that round-trips the exact double.
std::string format_double(double v);

// Token stream writer for the flat model files. Tokens are whitespace
// separated; string tokens therefore must not contain whitespace.
class Writer {
 public:
  Writer& tok(std::string_view t);
  Writer& num(double v);
  Writer& num(std::int64_t v) { return tok(std::to_string(v)); }
  Writer& num(int v) { return num(static_cast<std::int64_t>(v)); }
  Writer& num(Index v) { return num(static_cast<std::int64_t>(v)); }
  Writer& hex(std::uint64_t v);
  Writer& mat(const Matrix& m);    // rows cols + row-major entries
  Writer& vec(const Vector& v);    // size + entries
  Writer& endl();

  const std::string& str() const { return out_; }

 private:
  std::string out_;
  bool line_open_ = false;
};

class Reader {
 public:
  explicit Reader(std::string text, std::string source = "<memory>");

  bool at_end();
  std::string next();
  double next_double();
  std::int64_t next_int();
  std::uint64_t next_hex();
  void expect(std::string_view tok);
  Matrix next_matrix();
  Vector next_vector();

 private:
  [[noreturn]] void fail(const std::string& what);
  std::string text_;
  std::size_t pos_ = 0;
  std::string source_;
};

std::string read_file(const std::filesystem::path& path);
// Write-then-rename so partially written artifacts are never observed.
void atomic_write(const std::filesystem::path& path, std::string_view content);

}  // namespace clickboost::serial
