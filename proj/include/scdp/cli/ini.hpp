#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace scdp::cli {

struct IniValue {
  std::string text;
  int line = 0;
};

// Sectioned key = value text. '#' and ';' start comments; keys are case
// sensitive; a key may appear once per section.
class IniDocument {
 public:
  // Throws ConfigError "source:line: message" on malformed input.
  static IniDocument parse(std::string_view text, std::string source);

  const std::string& source() const noexcept { return source_; }
  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }
  int section_line(const std::string& name) const;
  const IniValue* find(const std::string& section, const std::string& key) const;
  std::vector<std::string> section_names() const;
  std::vector<std::string> keys(const std::string& section) const;

  // Sorted "section.key=value" lines, used for hashing.
  std::string canonical() const;

  [[noreturn]] void fail(int line, const std::string& message) const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, IniValue>> sections_;
  std::map<std::string, int> section_lines_;
};

}  // namespace scdp::cli
