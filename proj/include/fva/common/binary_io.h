// Copyright (c) 2026 The fva Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FVA_COMMON_BINARY_IO_H_
#define FVA_COMMON_BINARY_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fva {

// Little-endian byte encoder. All on-disk containers go through this so the
// layout is independent of host endianness.
class ByteWriter {
 public:
  void U8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void U16(uint16_t v);
  void U32(uint32_t v);
  void U64(uint64_t v);
  void F32(float v);
  void F64(double v);
  void Bytes(std::string_view s) { buf_.append(s.data(), s.size()); }
  void F32Array(std::span<const float> v);
  void Reserve(size_t n) { buf_.reserve(n); }

  const std::string& buffer() const { return buf_; }
  std::string Release() { return std::move(buf_); }

 private:
  std::string buf_;
};

// Decoder over an in-memory buffer. Running past the end throws an IO error
// naming the byte offset and what was being read.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string source)
      : data_(data), source_(std::move(source)) {}

  uint8_t U8(const char* what);
  uint16_t U16(const char* what);
  uint32_t U32(const char* what);
  uint64_t U64(const char* what);
  float F32(const char* what);
  double F64(const char* what);
  std::string_view Bytes(size_t n, const char* what);
  void F32Array(std::span<float> out, const char* what);

  size_t offset() const { return pos_; }
  bool AtEnd() const { return pos_ == data_.size(); }
  const std::string& source() const { return source_; }

 private:
  void Need(size_t n, const char* what) const;

  std::string_view data_;
  std::string source_;
  size_t pos_ = 0;
};

std::string ReadFileBytes(const std::string& path);

// Writes to `path.tmp` then renames, so readers never observe a torn file.
void WriteFileAtomic(const std::string& path, std::string_view bytes);

}  // namespace fva

#endif  // FVA_COMMON_BINARY_IO_H_
