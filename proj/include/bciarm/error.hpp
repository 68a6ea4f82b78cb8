#pragma once

#include <stdexcept>
#include <string>

namespace bciarm {

// Contract violations and domain failures (bad arguments, unreachable
// targets, untrained models). The CLI maps these to exit code 2.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing files, unreadable or malformed file content. Exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bciarm
