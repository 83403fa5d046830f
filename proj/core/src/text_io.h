// Copyright 2026 The gazekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZEKIT_SRC_TEXT_IO_H_
#define GAZEKIT_SRC_TEXT_IO_H_

// Helpers for the whitespace-separated model file formats.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

#include "gazekit/error.h"

namespace gazekit::text_io {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class TokenReader {
 public:
  explicit TokenReader(std::string_view text) : text_(text) {}

  std::string_view next() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    if (pos_ >= text_.size()) fail("unexpected end of model file");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view token) {
    const std::string_view got = next();
    if (got != token) {
      fail("expected '" + std::string(token) + "', found '" + std::string(got) + "'");
    }
  }

  double number() {
    const std::string token(next());
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) fail("bad number '" + token + "'");
    return v;
  }

  long integer() {
    const std::string token(next());
    char* end = nullptr;
    const long v = std::strtol(token.c_str(), &end, 10);
    if (end != token.c_str() + token.size()) fail("bad integer '" + token + "'");
    return v;
  }

  [[noreturn]] static void fail(const std::string& what) {
    throw Error(ErrorCode::kMalformedRecord, what);
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\n' || c == '\t' || c == '\r';
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace gazekit::text_io

#endif  // GAZEKIT_SRC_TEXT_IO_H_
