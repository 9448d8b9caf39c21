// Copyright 2026 The dreamcfr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DREAMCFR_BINARY_IO_H_
#define DREAMCFR_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dreamcfr/errors.h"

namespace dreamcfr {

// Little-endian primitives for checkpoint files.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void U64(uint64_t v) {
    char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
    out_.write(b, 8);
  }
  void U32(uint32_t v) {
    char b[4];
    for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
    out_.write(b, 4);
  }
  void I64(int64_t v) { U64(static_cast<uint64_t>(v)); }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void F32(float v) { U32(std::bit_cast<uint32_t>(v)); }
  void Str(const std::string& s) {
    U64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void Floats(const std::vector<float>& v) {
    U64(v.size());
    for (float x : v) F32(x);
  }
  bool ok() const { return static_cast<bool>(out_); }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  uint64_t U64() {
    unsigned char b[8];
    in_.read(reinterpret_cast<char*>(b), 8);
    if (!in_) throw InvalidInputError("truncated binary data");
    uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= uint64_t{b[k]} << (8 * k);
    return v;
  }
  uint32_t U32() {
    unsigned char b[4];
    in_.read(reinterpret_cast<char*>(b), 4);
    if (!in_) throw InvalidInputError("truncated binary data");
    uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= uint32_t{b[k]} << (8 * k);
    return v;
  }
  int64_t I64() { return static_cast<int64_t>(U64()); }
  double F64() { return std::bit_cast<double>(U64()); }
  float F32() { return std::bit_cast<float>(U32()); }
  std::string Str() {
    const uint64_t n = Size();
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) throw InvalidInputError("truncated binary data");
    return s;
  }
  std::vector<float> Floats() {
    std::vector<float> v(Size());
    for (float& x : v) x = F32();
    return v;
  }
  uint64_t Size() {
    const uint64_t n = U64();
    if (n > (uint64_t{1} << 34)) throw InvalidInputError("implausible length");
    return n;
  }

 private:
  std::istream& in_;
};

}  // namespace dreamcfr

#endif  // DREAMCFR_BINARY_IO_H_
