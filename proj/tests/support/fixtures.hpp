#pragma once

// Access to the fixture corpus from tests.

#include <fstream>
#include <sstream>
#include <string>

#include "cbv/parser.hpp"
#include "cbv/proof.hpp"

namespace cbv::fixtures {

inline std::string path(const std::string& rel) { return std::string(CBV_FIXTURES) + "/" + rel; }

inline std::string read(const std::string& rel) {
  std::ifstream in(path(rel));
  if (!in) throw std::runtime_error("missing fixture " + rel);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Program program(const std::string& rel) { return parseProgram(read(rel)); }

inline Derivation proof(const std::string& rel) { return parseProof(read(rel)); }

}  // namespace cbv::fixtures
