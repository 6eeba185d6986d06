// Copyright 2026 The segmark Authors
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

#include "segmark/model/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "segmark/text/rng.h"

namespace segmark::model {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

using nlohmann::json;

namespace {

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    T value;
    std::memcpy(&value, take(sizeof(T)), sizeof(T));
    return value;
  }

  const char* take(std::size_t n) {
    if (n > bytes_.size() - pos_) throw CheckpointError("checkpoint truncated");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Segmenter& model, const json& meta) {
  ModelParams params = model.params;
  auto views = params.dense.views();
  json tensors = json::array();
  tensors.push_back({{"name", "embedding"}, {"size", params.embedding.size()}});
  std::size_t count = static_cast<std::size_t>(params.embedding.size());
  for (const auto& v : views) {
    tensors.push_back({{"name", v.name}, {"size", v.size}});
    count += v.size;
  }
  json header = {{"format", "segmark-checkpoint"},
                 {"model", to_json(params.config)},
                 {"style", model.style.to_json()},
                 {"temperature", model.temperature},
                 {"tensors", tensors},
                 {"meta", meta}};
  const std::string head = header.dump();

  std::string out(kCheckpointMagic, sizeof kCheckpointMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, head.size());
  out += head;
  put<std::uint64_t>(out, count);
  out.reserve(out.size() + count * sizeof(double));
  out.append(reinterpret_cast<const char*>(params.embedding.data()),
             static_cast<std::size_t>(params.embedding.size()) * sizeof(double));
  for (const auto& v : views) {
    out.append(reinterpret_cast<const char*>(v.data), v.size * sizeof(double));
  }
  return out;
}

Segmenter deserialize_checkpoint(const std::string& bytes, json* meta) {
  Reader in(bytes);
  if (std::memcmp(in.take(sizeof kCheckpointMagic), kCheckpointMagic,
                  sizeof kCheckpointMagic) != 0) {
    throw CheckpointError("not a segmark checkpoint");
  }
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto head_len = in.get<std::uint64_t>();
  const char* head = in.take(head_len);
  json header;
  try {
    header = json::parse(head, head + head_len);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }

  Segmenter model;
  model.params = ModelParams::zeros(model_config_from_json(header.at("model")));
  model.style = stylometry::StyleExtractor::from_json(header.at("style"));
  model.temperature = header.at("temperature").get<double>();
  if (meta) *meta = header.value("meta", json());

  auto views = model.params.dense.views();
  const json& tensors = header.at("tensors");
  if (tensors.size() != views.size() + 1) throw CheckpointError("tensor list mismatch");
  const auto expect = [&tensors](std::size_t i, const std::string& name, std::size_t size) {
    if (tensors[i].at("name") != name || tensors[i].at("size") != size) {
      throw CheckpointError("tensor " + name + " does not match the model config");
    }
  };
  expect(0, "embedding", static_cast<std::size_t>(model.params.embedding.size()));
  std::size_t count = static_cast<std::size_t>(model.params.embedding.size());
  for (std::size_t i = 0; i < views.size(); ++i) {
    expect(i + 1, views[i].name, views[i].size);
    count += views[i].size;
  }
  if (in.get<std::uint64_t>() != count) throw CheckpointError("parameter count mismatch");
  const auto read_into = [&in](double* dst, std::size_t n) {
    std::memcpy(dst, in.take(n * sizeof(double)), n * sizeof(double));
  };
  read_into(model.params.embedding.data(),
            static_cast<std::size_t>(model.params.embedding.size()));
  for (auto& v : views) read_into(v.data, v.size);
  if (!in.done()) throw CheckpointError("trailing bytes after parameters");
  if (!model.params.all_finite()) throw CheckpointError("checkpoint holds non-finite parameters");
  return model;
}

void save_checkpoint(const std::string& path, const Segmenter& model, const json& meta) {
  const std::string bytes = serialize_checkpoint(model, meta);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("write failed for " + path);
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Segmenter load_checkpoint(const std::string& path, json* meta) {
  return deserialize_checkpoint(read_file(path), meta);
}

std::string checkpoint_hash(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(text::fnv1a64(bytes)));
  return buf;
}

std::string checkpoint_file_hash(const std::string& path) {
  return checkpoint_hash(read_file(path));
}

}  // namespace segmark::model
