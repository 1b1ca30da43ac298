#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "anfj/program.hpp"

namespace anfj::corpus {

inline std::filesystem::path corpus_dir() { return ANFJ_CORPUS_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir()))
    if (e.path().extension() == ".anfj") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline LabeledProgram load_corpus(const std::string& name) {
  return load_program(read_file(corpus_dir() / (name + ".anfj")));
}

/// The `// expect: ...` line of a corpus file, without the prefix.
inline std::string expected_outcome(const std::filesystem::path& p) {
  std::istringstream in(read_file(p));
  std::string line;
  const std::string tag = "// expect: ";
  while (std::getline(in, line))
    if (line.rfind(tag, 0) == 0) return line.substr(tag.size());
  return {};
}

/// Label of the statement in `method` ("Cls.m") whose text is `text`,
/// e.g. label_at(lp, "Main.main", "y = x").
inline Label label_at(const LabeledProgram& lp, const std::string& method, const std::string& text) {
  for (const Stmt& st : lp.statements()) {
    std::string d = lp.describe(st.label);
    std::string head = method + ":" + std::to_string(st.label) + " ";
    if (d == head + text) return st.label;
  }
  throw std::runtime_error("no statement '" + text + "' in " + method);
}

}  // namespace anfj::corpus
