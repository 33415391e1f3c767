#include "pinning/util.hpp"

#include <charconv>

namespace pinning {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace pinning
