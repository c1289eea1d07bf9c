// Copyright 2026 The LFDG Authors
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

#include "lfdg/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "lfdg/error.hpp"

namespace lfdg {
namespace {

constexpr char kMagic[4] = {'L', 'F', 'D', 'G'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kCorruptCheckpoint,
                  std::string("truncated while reading ") + what);
    }
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8, "payload");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string str(std::size_t n) {
    need(n, "name");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const ParamSet& params) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : t.values()) put_f64(out, v);
  }
  return out;
}

ParamSet decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kCorruptCheckpoint, "bad magic");
  }
  Reader in(bytes.subspan(4));
  const std::uint32_t version = in.u32("version");
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                "unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = in.u32("entry count");
  ParamSet out;
  for (std::uint32_t e = 0; e < count; ++e) {
    const std::string name = in.str(in.u32("name length"));
    const std::uint32_t rank = in.u32("rank");
    if (rank > 16) throw Error(ErrorCode::kCorruptCheckpoint, "implausible rank");
    Shape shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
      d = in.u32("dims");
      if (d == 0) throw Error(ErrorCode::kCorruptCheckpoint, "zero dimension");
      n *= d;
    }
    in.need(n * 8, "payload");
    std::vector<double> values(n);
    for (double& v : values) v = in.f64();
    if (out.contains(name)) {
      throw Error(ErrorCode::kCorruptCheckpoint, "duplicate entry '" + name + "'");
    }
    try {
      out.insert(name, Tensor::from_values(std::move(shape), std::move(values)));
    } catch (const Error& err) {
      throw Error(ErrorCode::kCorruptCheckpoint, "entry '" + name + "': " + err.what());
    }
  }
  if (!in.done()) throw Error(ErrorCode::kCorruptCheckpoint, "trailing bytes");
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params) {
  const auto bytes = encode_checkpoint(params);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIo, "cannot open " + tmp.string());
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "rename to " + path.string() + ": " + ec.message());
}

ParamSet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace lfdg
