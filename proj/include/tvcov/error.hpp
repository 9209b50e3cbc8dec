// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_ERROR_HPP_
#define TVCOV_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace tvcov {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments, inconsistent geometry, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingFileError : public Error {
 public:
  explicit MissingFileError(const std::string& path)
      : Error("file not found: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Numerical breakdown. frequency/frame are -1 when unknown.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, int frequency = -1,
                          int frame = -1)
      : Error(Format(what, frequency, frame)),
        detail_(what),
        frequency_(frequency),
        frame_(frame) {}

  int frequency() const { return frequency_; }
  int frame() const { return frame_; }
  const std::string& detail() const { return detail_; }

  NumericalError WithFrequency(int k) const {
    return NumericalError(detail_, k, frame_);
  }

 private:
  static std::string Format(const std::string& what, int k, int l) {
    std::string s = what;
    if (k >= 0) s += " (frequency " + std::to_string(k);
    if (l >= 0) s += (k >= 0 ? ", frame " : " (frame ") + std::to_string(l);
    if (k >= 0 || l >= 0) s += ")";
    return s;
  }

  std::string detail_;
  int frequency_;
  int frame_;
};

}  // namespace tvcov

#endif  // TVCOV_ERROR_HPP_
