#pragma once

#include <string>

#include "rerl/reversible.hpp"
#include "rerl/system.hpp"

namespace rerl {

/// Textual form of a state with pids and unique ids renamed by order of
/// first occurrence: processes in pid order, then the global mailbox in
/// (sender, receiver) order, then histories. Two states that differ by an
/// order-preserving renaming of their identifiers canonicalize equally.
std::string canonicalize(const System& sys);
std::string canonicalize(const RSystem& sys);

/// The same layout without renaming, for diagnostics.
std::string render(const System& sys);
std::string render(const RSystem& sys);

/// Renames every `<pN>` / `<tN>` token in `text` by first occurrence,
/// leaving quoted atoms alone.
std::string rename_identifiers(const std::string& text);

/// 64-bit FNV-1a as 16 hex digits.
std::string digest(const std::string& text);

/// First differing line of two renderings, or empty when equal.
std::string first_difference(const std::string& a, const std::string& b);

}  // namespace rerl
