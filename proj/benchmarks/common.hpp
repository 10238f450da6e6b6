#pragma once

#include <fstream>
#include <sstream>
#include <string>

inline std::string grammar_text(const char* name) {
  std::ifstream in(std::string(REGREG_GRAMMAR_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
