#pragma once

#include <cstddef>
#include <string_view>

namespace circlab {

enum class Kind { RC, SC };

std::string_view to_string(Kind k);
Kind parse_kind(std::string_view name);

// Number of distinct entry processes a dimension-n matrix reads.
std::size_t label_count(Kind k, std::size_t n);

}  // namespace circlab
