#pragma once

#include <string>
#include <vector>

namespace dirfuzz {

using FunctionId = std::string;

// A test case: a finite sequence of syscall names. Arguments are out of
// scope; sequencing is the only degree of freedom.
struct Program {
  std::vector<FunctionId> calls;

  bool operator==(const Program&) const = default;
  size_t size() const { return calls.size(); }
  bool empty() const { return calls.empty(); }
};

}  // namespace dirfuzz
