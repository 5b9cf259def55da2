#include "scdp/cli/ini.hpp"

#include <fmt/format.h>

#include "scdp/errors.hpp"

namespace scdp::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
      return s.substr(0, i);
    }
  }
  return s;
}

}  // namespace

IniDocument IniDocument::parse(std::string_view text, std::string source) {
  IniDocument doc;
  doc.source_ = std::move(source);
  std::string current;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') doc.fail(line_no, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) doc.fail(line_no, "empty section name");
      if (doc.sections_.count(name)) doc.fail(line_no, fmt::format("duplicate section [{}]", name));
      doc.sections_[name];
      doc.section_lines_[name] = line_no;
      current = name;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) doc.fail(line_no, "expected 'key = value'");
    if (current.empty()) doc.fail(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) doc.fail(line_no, "empty key");
    auto& sec = doc.sections_[current];
    if (sec.count(key)) doc.fail(line_no, fmt::format("duplicate key '{}' in [{}]", key, current));
    sec[key] = {value, line_no};
  }
  return doc;
}

int IniDocument::section_line(const std::string& name) const {
  const auto it = section_lines_.find(name);
  return it == section_lines_.end() ? 0 : it->second;
}

const IniValue* IniDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::vector<std::string> IniDocument::section_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : sections_) out.push_back(name);
  return out;
}

std::vector<std::string> IniDocument::keys(const std::string& section) const {
  std::vector<std::string> out;
  const auto s = sections_.find(section);
  if (s != sections_.end()) {
    for (const auto& [key, _] : s->second) out.push_back(key);
  }
  return out;
}

std::string IniDocument::canonical() const {
  std::string out;
  for (const auto& [name, entries] : sections_) {
    for (const auto& [key, value] : entries) out += fmt::format("{}.{}={}\n", name, key, value.text);
  }
  return out;
}

void IniDocument::fail(int line, const std::string& message) const {
  throw ConfigError(fmt::format("{}:{}: {}", source_, line, message));
}

}  // namespace scdp::cli
