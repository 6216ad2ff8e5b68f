#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace anticonc::cli {

/// `lo:hi:Nlog` (geometric, lo > 0) or `lo:hi:Nlin`, both endpoints
/// included. Throws InputError on malformed specs.
std::vector<double> parse_grid(std::string_view spec);

/// `lo:hi` integer range, or a single integer.
std::pair<std::size_t, std::size_t> parse_range(std::string_view spec);

}  // namespace anticonc::cli
