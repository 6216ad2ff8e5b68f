#include "cli/grid.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "anticonc/error.hpp"

namespace anticonc::cli {

namespace {

double to_double(std::string_view s, std::string_view spec) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw InputError("bad number '" + std::string(s) + "' in '" + std::string(spec) + "'");
  return v;
}

std::size_t to_count(std::string_view s, std::string_view spec) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError("bad integer '" + std::string(s) + "' in '" + std::string(spec) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3)
    throw InputError("grid '" + std::string(spec) + "': expected lo:hi:N(log|lin)");
  const double lo = to_double(parts[0], spec);
  const double hi = to_double(parts[1], spec);
  std::string_view count = parts[2];
  bool log_spaced = false;
  if (count.ends_with("log")) {
    log_spaced = true;
  } else if (!count.ends_with("lin")) {
    throw InputError("grid '" + std::string(spec) + "': spacing must be log or lin");
  }
  count.remove_suffix(3);
  const std::size_t n = to_count(count, spec);
  if (n == 0) throw InputError("grid '" + std::string(spec) + "': need at least one point");
  if (lo > hi) throw InputError("grid '" + std::string(spec) + "': lo exceeds hi");
  if (log_spaced && !(lo > 0.0))
    throw InputError("grid '" + std::string(spec) + "': log grid needs lo > 0");

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = log_spaced ? std::exp(std::log(lo) + frac * (std::log(hi) - std::log(lo)))
                        : lo + frac * (hi - lo);
  }
  out.front() = lo;
  if (n > 1) out.back() = hi;
  return out;
}

std::pair<std::size_t, std::size_t> parse_range(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) {
    const std::size_t v = to_count(parts[0], spec);
    return {v, v};
  }
  if (parts.size() != 2) throw InputError("range '" + std::string(spec) + "': expected lo:hi");
  return {to_count(parts[0], spec), to_count(parts[1], spec)};
}

}  // namespace anticonc::cli
