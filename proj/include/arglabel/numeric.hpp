#ifndef ARGLABEL_NUMERIC_HPP
#define ARGLABEL_NUMERIC_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arglabel {

// Correctly rounded sum (Shewchuk partials). The result does not depend on
// the order of the inputs.
double exact_sum(std::span<const double> values);
// Same, reusing `scratch` for the partials.
double exact_sum(std::span<const double> values, std::vector<double>& scratch);

// 64-bit FNV-1a, used for config hashes and input fingerprints.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t v);

// Shortest text that parses back to the same double.
std::string format_real(double v);

}  // namespace arglabel

#endif  // ARGLABEL_NUMERIC_HPP
