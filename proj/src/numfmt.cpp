#include "selectmax/numfmt.hpp"

#include <charconv>

namespace selectmax {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace selectmax
