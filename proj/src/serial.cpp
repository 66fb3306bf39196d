#include "clickboost/serial.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>

#include "clickboost/errors.hpp"

namespace clickboost::serial {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Writer& Writer::tok(std::string_view t) {
  if (line_open_) out_ += ' ';
  out_ += t;
  line_open_ = true;
  return *this;
}

Writer& Writer::num(double v) { return tok(format_double(v)); }

Writer& Writer::hex(std::uint64_t v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, 16);
  return tok(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

Writer& Writer::mat(const Matrix& m) {
  num(m.rows()).num(m.cols());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) num(m(r, c));
  return *this;
}

Writer& Writer::vec(const Vector& v) {
  num(v.size());
  for (Index i = 0; i < v.size(); ++i) num(v(i));
  return *this;
}

Writer& Writer::endl() {
  out_ += '\n';
  line_open_ = false;
  return *this;
}

Reader::Reader(std::string text, std::string source)
    : text_(std::move(text)), source_(std::move(source)) {}

void Reader::fail(const std::string& what) {
  throw DataError(source_ + ": " + what);
}

bool Reader::at_end() {
  while (pos_ < text_.size() &&
         std::isspace(static_cast<unsigned char>(text_[pos_])))
    ++pos_;
  return pos_ >= text_.size();
}

std::string Reader::next() {
  if (at_end()) fail("unexpected end of stream");
  std::size_t start = pos_;
  while (pos_ < text_.size() &&
         !std::isspace(static_cast<unsigned char>(text_[pos_])))
    ++pos_;
  return text_.substr(start, pos_ - start);
}

double Reader::next_double() {
  std::string t = next();
  const char* begin = t.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + t.size()) fail("expected number, got '" + t + "'");
  return v;
}

std::int64_t Reader::next_int() {
  std::string t = next();
  std::int64_t v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    fail("expected integer, got '" + t + "'");
  return v;
}

std::uint64_t Reader::next_hex() {
  std::string t = next();
  std::uint64_t v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v, 16);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    fail("expected hex value, got '" + t + "'");
  return v;
}

void Reader::expect(std::string_view tok) {
  std::string t = next();
  if (t != tok)
    fail("expected '" + std::string(tok) + "', got '" + t + "'");
}

Matrix Reader::next_matrix() {
  Index rows = next_int();
  Index cols = next_int();
  if (rows < 0 || cols < 0) fail("negative matrix dimension");
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = next_double();
  return m;
}

Vector Reader::next_vector() {
  Index n = next_int();
  if (n < 0) fail("negative vector size");
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = next_double();
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const std::filesystem::path& path,
                  std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw DataError("rename failed: " + tmp.string() + " -> " + path.string() +
                    ": " + ec.message());
}

}  // namespace clickboost::serial
