#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace handrec {

// Library-wide exception type. Thrown on contract violations, bad inputs
// and I/O failures; callers that want error codes catch at the boundary.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline void format_into(std::ostringstream&) {}

template <typename T, typename... Rest>
void format_into(std::ostringstream& os, const T& head, const Rest&... rest) {
  os << head;
  format_into(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string msg(const Args&... args) {
  std::ostringstream os;
  detail::format_into(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
  throw Error(msg(args...));
}

template <typename... Args>
void require(bool condition, const Args&... args) {
  if (!condition) fail(args...);
}

}  // namespace handrec
