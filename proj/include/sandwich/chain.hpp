#pragma once

#include <string>

namespace sandwich {

/// Plain data augmentation, or the sandwich with a uniform label switch in the middle.
enum class Chain { MDA, FS };

const char* to_string(Chain chain);
/// Accepts "mda"/"fs" in either case; throws std::invalid_argument otherwise.
Chain parse_chain(const std::string& text);

}  // namespace sandwich
