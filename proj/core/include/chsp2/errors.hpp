#pragma once

#include <stdexcept>
#include <string>

namespace chsp2 {

// File and format problems: malformed headers, bad indices, duplicate
// entries, wrong line counts. Messages carry file name and line number
// where available.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Contract violations on otherwise well-formed data: invalid partitions,
// out-of-range arguments, illegal moves.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chsp2
