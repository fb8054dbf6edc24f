// Turns every ```cpp block of a markdown file that opens with
// "// walkthrough: <id>" into a GoogleTest case named Walkthrough.<id>.

#include <fstream>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>
#include <string>

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: extract_walkthroughs <walkthroughs.md> <out.cpp>\n";
    return 2;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "cannot read " << argv[1] << "\n";
    return 2;
  }

  const std::regex header(R"(^\s*//\s*walkthrough:\s*([A-Za-z0-9_]+)\s*$)");
  std::ostringstream body;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  bool in_block = false;
  bool first_line = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!in_block) {
      if (line.rfind("```cpp", 0) == 0) {
        in_block = true;
        first_line = true;
      }
      continue;
    }
    if (line.rfind("```", 0) == 0) {
      body << "}\n\n";
      in_block = false;
      continue;
    }
    if (first_line) {
      std::smatch m;
      if (!std::regex_match(line, m, header)) {
        std::cerr << argv[1] << ":" << line_no << ": block must start with // walkthrough: <id>\n";
        return 1;
      }
      if (!ids.insert(m[1]).second) {
        std::cerr << argv[1] << ":" << line_no << ": duplicate walkthrough " << m[1] << "\n";
        return 1;
      }
      body << "TEST(Walkthrough, " << m[1] << ") {\n#line " << line_no + 1 << " \"" << argv[1] << "\"\n";
      first_line = false;
      continue;
    }
    body << line << "\n";
  }
  if (in_block) {
    std::cerr << argv[1] << ": unterminated code block\n";
    return 1;
  }

  std::ofstream out(argv[2]);
  out << "// Generated from " << argv[1] << "; edit the markdown instead.\n"
      << "#include <gtest/gtest.h>\n\n"
      << "#include \"walkthrough_support.hpp\"\n\n"
      << "using namespace pirlab;\n\n"
      << body.str();
  return out ? 0 : 1;
}
