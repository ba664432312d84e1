#include "arglabel/numeric.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

namespace arglabel {

double exact_sum(std::span<const double> values) {
  std::vector<double> partials;
  return exact_sum(values, partials);
}

double exact_sum(std::span<const double> values, std::vector<double>& partials) {
  partials.clear();
  double special = 0.0;
  bool has_special = false;
  for (double x : values) {
    if (!std::isfinite(x)) {
      special += x;
      has_special = true;
      continue;
    }
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  if (has_special) return special;

  std::size_t n = partials.size();
  double hi = 0.0;
  if (n == 0) return hi;
  hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  // Round half-even across the remaining partials.
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) ||
                (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace arglabel
