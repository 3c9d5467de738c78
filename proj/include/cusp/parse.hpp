#pragma once

// Exact field elements from text such as "7/6+1/6*sqrt(13)", "(3+√13)/2",
// "1/2 + 1/2 sqrt 5" or "1+a" (a is the ring generator alpha).

#include <string_view>

#include "cusp/quadfield.hpp"

namespace cusp {

/// Throws ParseError on malformed text, CtxMismatch when a square root of
/// something other than (square)*n or a perfect square appears, and
/// DivisionByZero.
QuadElem parse_element(const FieldCtx& ctx, std::string_view text);

/// "2..30" or "7" -> inclusive range; ParseError otherwise.
std::pair<std::int64_t, std::int64_t> parse_range(std::string_view text);

}  // namespace cusp
