/*
 * Copyright 2026 The ASR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "asr/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>

namespace asr {

namespace {

// Storage row of the i-th value on a line: DistMult is in order, ComplEx
// alternates re(j), im(j).
Eigen::Index storage_row(ModelKind kind, Eigen::Index k, Eigen::Index i) {
  if (kind == ModelKind::kDistMult) return i;
  return (i % 2 == 0) ? i / 2 : k + i / 2;
}

void write_block(std::ostream& out, const char* title, const Matrix& m,
                 const std::vector<std::string>& names, ModelKind kind, Eigen::Index k) {
  out << '[' << title << "]\n";
  char buf[40];
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out << names[static_cast<std::size_t>(j)] << '\t';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", m(storage_row(kind, k, i), j));
      if (i > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  std::size_t line_no() const { return line_no_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("checkpoint line " + std::to_string(line_no_) + ": " + what, line_no_);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::size_t parse_count(LineReader& r, const std::string& key, const std::string& value) {
  std::size_t v = 0;
  const char* end = value.data() + value.size();
  auto [p, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || p != end) r.fail("bad value for " + key + ": '" + value + "'");
  return v;
}

void read_block(LineReader& r, const std::string& title, std::size_t count, ModelKind kind,
                Eigen::Index k, Matrix& m, std::vector<std::string>& names) {
  std::string line;
  if (!r.next(line)) {
    r.fail("truncated checkpoint: missing [" + title + "] section");
  }
  if (line != "[" + title + "]") r.fail("expected [" + title + "], found '" + line + "'");
  const Eigen::Index width = embedding_width(kind, k);
  m.resize(width, static_cast<Eigen::Index>(count));
  names.clear();
  for (std::size_t j = 0; j < count; ++j) {
    if (!r.next(line)) {
      r.fail("truncated checkpoint: [" + title + "] section has " + std::to_string(j) + " of " +
             std::to_string(count) + " rows");
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) r.fail("expected name<TAB>values");
    names.push_back(line.substr(0, tab));
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    Eigen::Index i = 0;
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      auto [q, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) r.fail("bad number in [" + title + "] row");
      if (i >= width) {
        r.fail("vector has more than the " + std::to_string(width) +
               " values implied by the header");
      }
      m(storage_row(kind, k, i), static_cast<Eigen::Index>(j)) = v;
      ++i;
      p = q;
    }
    if (i != width) {
      r.fail("vector has " + std::to_string(i) + " values, header implies " +
             std::to_string(width));
    }
  }
}

}  // namespace

void write_checkpoint(std::ostream& out, const ModelParams& params, Subspace subspace,
                      const Vocabulary& vocab) {
  if (static_cast<std::size_t>(params.entities.cols()) != vocab.num_entities() ||
      static_cast<std::size_t>(params.relations.cols()) != vocab.num_relations()) {
    throw DimensionError("checkpoint: parameter and vocabulary sizes differ");
  }
  out << kCheckpointMagic << " v" << kCheckpointVersion << '\n';
  out << "model=" << model_name(params.kind) << '\n';
  out << "k=" << params.dim << '\n';
  out << "subspace=" << subspace_name(subspace) << '\n';
  out << "entities=" << vocab.num_entities() << '\n';
  out << "relations=" << vocab.num_relations() << '\n';
  write_block(out, "entities", params.entities, vocab.entities(), params.kind, params.dim);
  write_block(out, "relations", params.relations, vocab.relations(), params.kind, params.dim);
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     Subspace subspace, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_checkpoint(out, params, subspace, vocab);
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

Checkpoint read_checkpoint(std::istream& in) {
  LineReader r(in);
  std::string line;
  if (!r.next(line)) r.fail("empty checkpoint");
  const std::string magic = std::string(kCheckpointMagic) + " v";
  if (line.rfind(magic, 0) != 0) r.fail("not a checkpoint (missing " + magic + "N header)");
  if (line != magic + std::to_string(kCheckpointVersion)) {
    r.fail("unsupported checkpoint version '" + line.substr(magic.size()) + "'");
  }

  std::map<std::string, std::string> header;
  while (header.size() < 5) {
    if (!r.next(line)) r.fail("truncated checkpoint: header incomplete");
    const auto eq = line.find('=');
    if (eq == std::string::npos) r.fail("expected key=value header line, found '" + line + "'");
    header[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* key : {"model", "k", "subspace", "entities", "relations"}) {
    if (!header.count(key)) r.fail(std::string("header misses '") + key + "'");
  }
  Checkpoint ck;
  const auto kind = parse_model_name(header["model"]);
  if (!kind) r.fail("unknown model '" + header["model"] + "'");
  const auto sub = parse_subspace_name(header["subspace"]);
  if (!sub) r.fail("unknown subspace '" + header["subspace"] + "'");
  const std::size_t k = parse_count(r, "k", header["k"]);
  if (k < 1) r.fail("k must be >= 1");
  const std::size_t n_ent = parse_count(r, "entities", header["entities"]);
  const std::size_t n_rel = parse_count(r, "relations", header["relations"]);

  ck.subspace = *sub;
  ck.params.kind = *kind;
  ck.params.dim = static_cast<Eigen::Index>(k);
  std::vector<std::string> ent_names, rel_names;
  read_block(r, "entities", n_ent, *kind, ck.params.dim, ck.params.entities, ent_names);
  read_block(r, "relations", n_rel, *kind, ck.params.dim, ck.params.relations, rel_names);
  while (r.next(line)) {
    if (!line.empty()) r.fail("unexpected content after [relations] section");
  }
  for (const auto& n : ent_names) {
    if (ck.vocab.find_entity(n)) r.fail("duplicate entity '" + n + "'");
    ck.vocab.entity_id(n);
  }
  for (const auto& n : rel_names) {
    if (ck.vocab.find_relation(n)) r.fail("duplicate relation '" + n + "'");
    ck.vocab.relation_id(n);
  }
  ck.vocab.freeze();
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace asr
