// Copyright 2026 The dynlstm Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "dynlstm/harness/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dynlstm/errors.hpp"

namespace dynlstm::harness {

namespace {

namespace fs = std::filesystem;

constexpr char kSequenceMagic[4] = {'D', 'L', 'S', 'Q'};
constexpr std::size_t kSequenceHeaderBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  put_u32(out, bits);
}

float get_f32(const std::uint8_t* p) {
  const std::uint32_t bits = get_u32(p);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseErrorKind::Io, "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, const void* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(ParseErrorKind::Io, "cannot write " + path);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw ParseError(ParseErrorKind::Io, "write failed for " + path);
}

std::string tensor_key(std::size_t layer, Gate g, const char* part) {
  return "layer." + std::to_string(layer) + "." + to_string(g) + "." + part;
}

struct Entry {
  std::string value;
  std::int64_t offset;  // byte offset of the line in the manifest
};

class Manifest {
 public:
  explicit Manifest(const std::string& text) : size_(static_cast<std::int64_t>(text.size())) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string line = text.substr(pos, end - pos);
      const auto offset = static_cast<std::int64_t>(pos);
      pos = end + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) {
        throw ParseError(ParseErrorKind::Syntax,
                         "manifest: expected 'key = value', got '" + line + "'",
                         offset);
      }
      const std::string key = line.substr(0, eq);
      if (entries_.count(key)) {
        throw ParseError(ParseErrorKind::Syntax, "manifest: duplicate key " + key,
                         offset);
      }
      entries_[key] = Entry{line.substr(eq + 3), offset};
    }
  }

  const Entry& at(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ParseError(ParseErrorKind::Syntax, "manifest: missing key " + key, size_);
    }
    return it->second;
  }

  std::uint64_t number(const std::string& key) const {
    const Entry& e = at(key);
    return parse_number(key, e.value, e.offset);
  }

  static std::uint64_t parse_number(const std::string& key, const std::string& s,
                                    std::int64_t offset) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError(ParseErrorKind::Syntax,
                       "manifest: " + key + " is not a non-negative integer: '" + s + "'",
                       offset);
    }
    return v;
  }

 private:
  std::map<std::string, Entry> entries_;
  std::int64_t size_;
};

struct Region {
  std::string key;
  std::uint64_t offset = 0;
  std::uint64_t bytes = 0;
  std::int64_t line = 0;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
};

Region read_region(const Manifest& m, const std::string& key, std::uint64_t rows,
                   std::uint64_t cols) {
  const Entry& e = m.at(key);
  const auto sp = e.value.find(' ');
  if (sp == std::string::npos) {
    throw ParseError(ParseErrorKind::Syntax,
                     "manifest: " + key + " must be '<offset> <bytes>'", e.offset);
  }
  Region r;
  r.key = key;
  r.offset = Manifest::parse_number(key, e.value.substr(0, sp), e.offset);
  r.bytes = Manifest::parse_number(key, e.value.substr(sp + 1), e.offset);
  r.line = e.offset;
  r.rows = rows;
  r.cols = cols;
  if (r.bytes != rows * cols * 4) {
    throw ParseError(ParseErrorKind::Dimension,
                     "manifest: " + key + " declares " + std::to_string(r.bytes) +
                         " bytes, dimensions need " + std::to_string(rows * cols * 4),
                     e.offset);
  }
  return r;
}

}  // namespace

ModelFiles encode_model(const LstmModel& model, const std::string& blob_name) {
  model.validate();
  ModelFiles files;
  std::ostringstream manifest;
  manifest << "# dynlstm model manifest\n"
           << "format = dynlstm-model\n"
           << "version = " << kModelFormatVersion << "\n"
           << "blob = " << blob_name << "\n";

  std::ostringstream regions;
  regions << "layers = " << model.layers.size() << "\n";
  const auto emit = [&](const std::string& key, std::span<const float> values) {
    regions << key << " = " << files.blob.size() << " " << values.size() * 4 << "\n";
    for (float v : values) put_f32(files.blob, v);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const LstmLayer& layer = model.layers[l];
    regions << "layer." << l << ".input_size = " << layer.input_size() << "\n"
            << "layer." << l << ".cell_size = " << layer.cell_size() << "\n";
    for (Gate g : kGates) {
      const GateWeights& w = layer.gate(g);
      emit(tensor_key(l, g, "w_x"), w.w_x.data());
      emit(tensor_key(l, g, "w_h"), w.w_h.data());
      emit(tensor_key(l, g, "b"), w.b);
    }
  }
  manifest << "blob_bytes = " << files.blob.size() << "\n" << regions.str();
  files.manifest = manifest.str();
  return files;
}

LstmModel decode_model(const std::string& manifest_text,
                       const std::vector<std::uint8_t>& blob) {
  const Manifest m(manifest_text);
  if (m.at("format").value != "dynlstm-model") {
    throw ParseError(ParseErrorKind::Syntax, "manifest: unknown format '" +
                                                 m.at("format").value + "'",
                     m.at("format").offset);
  }
  if (m.number("version") != kModelFormatVersion) {
    throw ParseError(ParseErrorKind::Syntax,
                     "manifest: unsupported version " + m.at("version").value,
                     m.at("version").offset);
  }
  const std::uint64_t blob_bytes = m.number("blob_bytes");
  if (blob.size() != blob_bytes) {
    throw ParseError(ParseErrorKind::Truncated,
                     std::string("blob ") + (blob.size() < blob_bytes ? "truncated" : "too long") +
                         ": expected " + std::to_string(blob_bytes) + " bytes, got " +
                         std::to_string(blob.size()),
                     static_cast<std::int64_t>(std::min<std::uint64_t>(blob.size(), blob_bytes)));
  }
  const std::uint64_t layers = m.number("layers");
  if (layers == 0) {
    throw ParseError(ParseErrorKind::Dimension, "manifest: model has no layers",
                     m.at("layers").offset);
  }

  LstmModel model;
  std::vector<Region> regions;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string prefix = "layer." + std::to_string(l) + ".";
    const std::uint64_t inputs = m.number(prefix + "input_size");
    const std::uint64_t cells = m.number(prefix + "cell_size");
    if (inputs == 0 || cells == 0) {
      throw ParseError(ParseErrorKind::Dimension,
                       "manifest: layer " + std::to_string(l) + " has a zero dimension",
                       m.at(prefix + "cell_size").offset);
    }
    if (l > 0 && inputs != model.layers.back().cell_size()) {
      throw ParseError(ParseErrorKind::Dimension,
                       "manifest: layer " + std::to_string(l) + " input_size " +
                           std::to_string(inputs) + " != layer " + std::to_string(l - 1) +
                           " cell_size " + std::to_string(model.layers.back().cell_size()),
                       m.at(prefix + "input_size").offset);
    }
    LstmLayer layer = LstmLayer::zeros(cells, inputs);
    for (Gate g : kGates) {
      regions.push_back(read_region(m, tensor_key(l, g, "w_x"), cells, inputs));
      regions.push_back(read_region(m, tensor_key(l, g, "w_h"), cells, cells));
      regions.push_back(read_region(m, tensor_key(l, g, "b"), cells, 1));
    }
    model.layers.push_back(std::move(layer));
  }

  // The regions must cover [0, blob_bytes) exactly once.
  std::vector<const Region*> sorted;
  for (const Region& r : regions) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const Region* a, const Region* b) { return a->offset < b->offset; });
  std::uint64_t cursor = 0;
  for (const Region* r : sorted) {
    if (r->offset != cursor) {
      throw ParseError(ParseErrorKind::Layout,
                       "blob layout: " + r->key + (r->offset < cursor ? " overlaps" : " leaves a gap") +
                           " (expected offset " + std::to_string(cursor) + ", declared " +
                           std::to_string(r->offset) + ")",
                       static_cast<std::int64_t>(std::min(cursor, r->offset)));
    }
    cursor += r->bytes;
  }
  if (cursor != blob_bytes) {
    throw ParseError(ParseErrorKind::Layout,
                     "blob layout: regions cover " + std::to_string(cursor) + " of " +
                         std::to_string(blob_bytes) + " bytes",
                     static_cast<std::int64_t>(std::min(cursor, blob_bytes)));
  }

  std::size_t next = 0;
  const auto fill = [&](std::span<float> dst) {
    const Region& r = regions[next++];
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = get_f32(blob.data() + r.offset + 4 * i);
  };
  for (LstmLayer& layer : model.layers) {
    for (Gate g : kGates) {
      GateWeights& w = layer.gate(g);
      fill(w.w_x.data());
      fill(w.w_h.data());
      fill(w.b);
    }
  }
  model.validate();
  return model;
}

void write_model(const LstmModel& model, const std::string& manifest_path,
                 const std::string& blob_name) {
  const fs::path manifest(manifest_path);
  const std::string name =
      blob_name.empty() ? manifest.filename().string() + ".bin" : blob_name;
  const ModelFiles files = encode_model(model, name);
  write_file((manifest.parent_path() / name).string(), files.blob.data(), files.blob.size());
  write_file(manifest_path, files.manifest.data(), files.manifest.size());
}

LstmModel load_model(const std::string& manifest_path) {
  const std::vector<std::uint8_t> raw = read_file(manifest_path);
  const std::string text(raw.begin(), raw.end());
  const Manifest m(text);
  const fs::path blob_path = fs::path(manifest_path).parent_path() / m.at("blob").value;
  return decode_model(text, read_file(blob_path.string()));
}

std::vector<std::uint8_t> encode_sequence(const InputSequence& seq) {
  seq.validate();
  std::vector<std::uint8_t> out(kSequenceMagic, kSequenceMagic + 4);
  put_u32(out, kSequenceFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(seq.length()));
  put_u32(out, static_cast<std::uint32_t>(seq.width()));
  out.reserve(kSequenceHeaderBytes + seq.length() * seq.width() * 4);
  for (const Vector& v : seq.steps) {
    for (float x : v) put_f32(out, x);
  }
  return out;
}

InputSequence decode_sequence(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kSequenceHeaderBytes) {
    throw ParseError(ParseErrorKind::Truncated,
                     "sequence header truncated: expected " +
                         std::to_string(kSequenceHeaderBytes) + " bytes, got " +
                         std::to_string(bytes.size()),
                     static_cast<std::int64_t>(bytes.size()));
  }
  if (!std::equal(kSequenceMagic, kSequenceMagic + 4, bytes.begin())) {
    throw ParseError(ParseErrorKind::Syntax, "sequence: bad magic", 0);
  }
  if (get_u32(bytes.data() + 4) != kSequenceFormatVersion) {
    throw ParseError(ParseErrorKind::Syntax, "sequence: unsupported version", 4);
  }
  const std::uint64_t steps = get_u32(bytes.data() + 8);
  const std::uint64_t width = get_u32(bytes.data() + 12);
  if (steps == 0 || width == 0) {
    throw ParseError(ParseErrorKind::Dimension, "sequence: zero steps or width", 8);
  }
  const std::uint64_t expected = kSequenceHeaderBytes + steps * width * 4;
  if (bytes.size() != expected) {
    throw ParseError(ParseErrorKind::Truncated,
                     std::string("sequence payload ") +
                         (bytes.size() < expected ? "truncated" : "too long") +
                         ": expected " + std::to_string(expected) + " bytes, got " +
                         std::to_string(bytes.size()),
                     static_cast<std::int64_t>(std::min<std::uint64_t>(bytes.size(), expected)));
  }
  InputSequence seq;
  seq.steps.assign(steps, Vector(width));
  const std::uint8_t* p = bytes.data() + kSequenceHeaderBytes;
  for (auto& v : seq.steps) {
    for (float& x : v) {
      x = get_f32(p);
      p += 4;
    }
  }
  return seq;
}

void write_sequence(const InputSequence& seq, const std::string& path) {
  const auto bytes = encode_sequence(seq);
  write_file(path, bytes.data(), bytes.size());
}

InputSequence load_sequence(const std::string& path) {
  return decode_sequence(read_file(path));
}

}  // namespace dynlstm::harness
