#pragma once

#include <string>
#include <string_view>

#include "refinery/heuristic/config.hpp"

namespace refinery::heuristic {

// U+00A0 and U+3000 become U+0020; invisible characters (Cf category and
// zero-width space/joiners, BOM) are removed; all else is byte-identical.
std::string normalize_characters(std::string_view text);

// Keeps the lines from the first through the last line that contains a
// punctuation character (Unicode P*). A first line of more than three words
// is kept even without punctuation. Returns "" when nothing qualifies.
std::string trim_effective_lines(std::string_view text);

// Removes the configured phrases inside lines (ASCII case-insensitive,
// repeated to a fixed point), then deletes lines that are non-empty and
// whitespace-only or that contain a line-drop pattern.
std::string scrub_lines(std::string_view text, const HeuristicConfig& config = {});

}  // namespace refinery::heuristic
