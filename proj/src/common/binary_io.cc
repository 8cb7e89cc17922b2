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

#include "fva/common/binary_io.h"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fva/common/error.h"

namespace fva {

namespace {

template <typename T>
void PutLe(std::string* buf, T v, int nbytes) {
  for (int i = 0; i < nbytes; ++i) {
    buf->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

}  // namespace

void ByteWriter::U16(uint16_t v) { PutLe(&buf_, v, 2); }
void ByteWriter::U32(uint32_t v) { PutLe(&buf_, v, 4); }
void ByteWriter::U64(uint64_t v) { PutLe(&buf_, v, 8); }
void ByteWriter::F32(float v) { U32(std::bit_cast<uint32_t>(v)); }
void ByteWriter::F64(double v) { U64(std::bit_cast<uint64_t>(v)); }

void ByteWriter::F32Array(std::span<const float> v) {
  if constexpr (std::endian::native == std::endian::little) {
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * 4);
  } else {
    for (float f : v) F32(f);
  }
}

void ByteReader::Need(size_t n, const char* what) const {
  if (data_.size() - pos_ < n) {
    std::ostringstream os;
    os << source_ << ": truncated at byte offset " << pos_ << " while reading "
       << what << " (need " << n << " bytes, " << data_.size() - pos_
       << " left)";
    throw Error(ErrorKind::kIo, os.str());
  }
}

uint8_t ByteReader::U8(const char* what) {
  Need(1, what);
  return static_cast<uint8_t>(data_[pos_++]);
}

uint16_t ByteReader::U16(const char* what) {
  Need(2, what);
  uint16_t v = 0;
  for (int i = 0; i < 2; ++i) {
    v |= static_cast<uint16_t>(static_cast<uint8_t>(data_[pos_ + i]))
         << (8 * i);
  }
  pos_ += 2;
  return v;
}

uint32_t ByteReader::U32(const char* what) {
  Need(4, what);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_ + i]))
         << (8 * i);
  }
  pos_ += 4;
  return v;
}

uint64_t ByteReader::U64(const char* what) {
  Need(8, what);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<uint64_t>(static_cast<uint8_t>(data_[pos_ + i]))
         << (8 * i);
  }
  pos_ += 8;
  return v;
}

float ByteReader::F32(const char* what) {
  return std::bit_cast<float>(U32(what));
}

double ByteReader::F64(const char* what) {
  return std::bit_cast<double>(U64(what));
}

std::string_view ByteReader::Bytes(size_t n, const char* what) {
  Need(n, what);
  std::string_view out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

void ByteReader::F32Array(std::span<float> out, const char* what) {
  Need(out.size() * 4, what);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), data_.data() + pos_, out.size() * 4);
    pos_ += out.size() * 4;
  } else {
    for (float& f : out) f = F32(what);
  }
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIo, "read failed: " + path);
  return os.str();
}

void WriteFileAtomic(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot open " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kIo, "write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorKind::kIo, "rename " + tmp + " -> " + path + ": " +
                                    ec.message());
  }
}

}  // namespace fva
