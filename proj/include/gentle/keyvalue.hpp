// Copyright 2026 The Gentle Authors
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

// Line-oriented key/value text used by scenario and model files.
//
//   # comment
//   key = value
//   [section]
//   key = value
//
// Sections may repeat (each occurrence is kept in order). Keys before the
// first section header belong to an unnamed section "".

#ifndef GENTLE_KEYVALUE_HPP_
#define GENTLE_KEYVALUE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gentle/errors.hpp"
#include "gentle/links.hpp"
#include "gentle/motion_clip.hpp"

namespace gentle::kv {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

class Section {
 public:
  Section(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

  const std::string& name() const { return name_; }
  std::size_t line() const { return line_; }
  const std::vector<Entry>& entries() const { return entries_; }

  void add(Entry e) {
    for (const auto& x : entries_) {
      if (x.key == e.key) throw ParseError("duplicate key '" + e.key + "'", e.line);
    }
    entries_.push_back(std::move(e));
  }

  const Entry* find(std::string_view key) const {
    for (const auto& e : entries_) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& e : entries_) {
      bool ok = false;
      for (auto k : keys) ok = ok || k == e.key;
      if (!ok) {
        throw ParseError("unknown key '" + e.key + "' in section [" + name_ + "]", e.line);
      }
    }
  }

  std::optional<std::string> text(std::string_view key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    for (auto tok : motion::detail_clip::split_ws(e.value)) {
      const auto v = motion::parse_double(tok);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("key '" + e.key + "': expected a finite number, got '" + std::string(tok) + "'",
                         e.line);
      }
      out.push_back(*v);
    }
    return out;
  }

  std::optional<std::vector<double>> numbers(std::string_view key, std::size_t count) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    auto v = numbers(*e);
    if (v.size() != count) {
      throw ParseError("key '" + e->key + "': expected " + std::to_string(count) + " values, got " +
                           std::to_string(v.size()),
                       e->line);
    }
    return v;
  }

  void read(std::string_view key, double& out) const {
    if (auto v = numbers(key, 1)) out = (*v)[0];
  }

  void read(std::string_view key, int& out) const {
    if (auto v = numbers(key, 1)) {
      const double d = (*v)[0];
      if (d != std::floor(d)) throw ParseError("key '" + std::string(key) + "': expected an integer", find(key)->line);
      out = static_cast<int>(d);
    }
  }

  void read(std::string_view key, std::size_t& out) const {
    int v = 0;
    if (find(key)) {
      read(key, v);
      if (v < 0) throw ParseError("key '" + std::string(key) + "': must be >= 0", find(key)->line);
      out = static_cast<std::size_t>(v);
    }
  }

  void read(std::string_view key, Vec3& out) const {
    if (auto v = numbers(key, 3)) out = {(*v)[0], (*v)[1], (*v)[2]};
  }

  std::optional<Vec3> vec3(std::string_view key) const {
    if (!find(key)) return std::nullopt;
    Vec3 v;
    read(key, v);
    return v;
  }

  std::size_t line_of(std::string_view key) const {
    const Entry* e = find(key);
    return e ? e->line : line_;
  }

 private:
  std::string name_;
  std::size_t line_;
  std::vector<Entry> entries_;
};

class Document {
 public:
  const std::vector<Section>& sections() const { return sections_; }

  // First section with this name, if any.
  const Section* section(std::string_view name) const {
    for (const auto& s : sections_) {
      if (s.name() == name) return &s;
    }
    return nullptr;
  }

  std::vector<const Section*> all(std::string_view name) const {
    std::vector<const Section*> out;
    for (const auto& s : sections_) {
      if (s.name() == name) out.push_back(&s);
    }
    return out;
  }

  void allow_sections(std::initializer_list<std::string_view> names,
                      std::initializer_list<std::string_view> repeatable = {}) const {
    std::set<std::string> seen;
    for (const auto& s : sections_) {
      bool ok = false;
      for (auto n : names) ok = ok || n == s.name();
      if (!ok) throw ParseError("unknown section [" + s.name() + "]", s.line());
      bool rep = false;
      for (auto n : repeatable) rep = rep || n == s.name();
      if (!rep && !seen.insert(s.name()).second) {
        throw ParseError("section [" + s.name() + "] appears more than once", s.line());
      }
    }
  }

  static Document parse(std::istream& in) {
    Document doc;
    doc.sections_.emplace_back("", 0);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string_view line = raw;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = motion::detail_clip::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3) throw ParseError("malformed section header", line_no);
        doc.sections_.emplace_back(std::string(motion::detail_clip::trim(line.substr(1, line.size() - 2))),
                                   line_no);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
      const auto key = motion::detail_clip::trim(line.substr(0, eq));
      const auto value = motion::detail_clip::trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError("empty key", line_no);
      doc.sections_.back().add({std::string(key), std::string(value), line_no});
    }
    if (doc.sections_.front().entries().empty()) doc.sections_.erase(doc.sections_.begin());
    return doc;
  }

 private:
  std::vector<Section> sections_;
};

}  // namespace gentle::kv

#endif  // GENTLE_KEYVALUE_HPP_
