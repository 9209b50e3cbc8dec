// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_TESTS_TEST_UTIL_HPP_
#define TVCOV_TESTS_TEST_UTIL_HPP_

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace tvcov::testing {

// Fresh scratch directory under $TVCOV_TEST_TMP (or the system temp dir).
inline std::filesystem::path ScratchDir(const std::string& name) {
  const char* root = std::getenv("TVCOV_TEST_TMP");
  std::filesystem::path dir =
      root ? std::filesystem::path(root) : std::filesystem::temp_directory_path() / "tvcov_tests";
  dir /= name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tvcov::testing

#endif  // TVCOV_TESTS_TEST_UTIL_HPP_
