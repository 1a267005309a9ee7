#pragma once

namespace ucreat {

inline constexpr char const* version = "0.1.0";

// Bumped whenever extraction output can change for identical parses.
inline constexpr char const* extractor_version = "events/1";

}  // namespace ucreat
