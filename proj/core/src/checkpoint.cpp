// Copyright 2026 The DGANN Authors.
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

#include "dgann/checkpoint.h"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dgann {
namespace {

class Writer {
 public:
  void bytes(std::string_view s) { out_.append(s); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  std::string take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string str() { return bytes(u32()); }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw std::runtime_error("checkpoint is truncated");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes("DGNN");
  w.u32(kCheckpointVersion);
  const ModelConfig& c = ckpt.model_config;
  for (std::size_t v : {c.d_model, c.n_heads, c.n_interaction, c.n_transformer, c.ffn_multiplier}) {
    w.u64(v);
  }
  const TargetTransform& t = ckpt.transform;
  w.str(target_name(t.target));
  w.u8(t.lsm ? 1 : 0);
  for (std::size_t k = 0; k < kNumElements + 1; ++k) w.f64(t.lsm ? t.lsm->theta[k] : 0.0);
  w.f64(t.mean);
  w.f64(t.std);
  w.u64(ckpt.seed);
  w.u64(ckpt.best_epoch);
  w.f64(ckpt.best_val_mae);
  w.u64(ckpt.parameters.size());
  for (const Parameter& p : ckpt.parameters) {
    w.str(p.name);
    w.u32(static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) w.u64(d);
    for (double v : p.value.values()) w.f64(v);
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.bytes(4) != "DGNN") throw std::runtime_error("not a DGANN checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ModelConfig& c = ckpt.model_config;
  c.d_model = r.u64();
  c.n_heads = r.u64();
  c.n_interaction = r.u64();
  c.n_transformer = r.u64();
  c.ffn_multiplier = r.u64();
  const std::string name = r.str();
  const auto target = parse_target(name);
  if (!target) throw std::runtime_error("checkpoint names unknown target '" + name + "'");
  ckpt.transform.target = *target;
  const bool has_lsm = r.u8() != 0;
  LsmModel lsm;
  for (std::size_t k = 0; k < kNumElements + 1; ++k) lsm.theta[k] = r.f64();
  if (has_lsm) {
    lsm.fitted = true;
    ckpt.transform.lsm = lsm;
  }
  ckpt.transform.mean = r.f64();
  ckpt.transform.std = r.f64();
  ckpt.seed = r.u64();
  ckpt.best_epoch = r.u64();
  ckpt.best_val_mae = r.f64();
  const std::uint64_t count = r.u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string pname = r.str();
    const std::uint32_t rank = r.u32();
    Shape shape(rank);
    for (auto& d : shape) d = r.u64();
    Tensor value(shape);
    for (double& v : value.values()) v = r.f64();
    ckpt.parameters.add(std::move(pname), std::move(value));
  }
  if (!r.done()) throw std::runtime_error("checkpoint has trailing bytes");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace dgann
