#pragma once

// JSON forms of states, trace events, choices and checker reports.
// Pids print as "p1" and unique ids as "t1"; terms and controls are
// pretty-printed in source syntax.

#include <json.hpp>

#include "rerl/check.hpp"
#include "rerl/reversible.hpp"

namespace rerl {

using Json = nlohmann::ordered_json;

/// Γ, then one entry per process in pid order. Histories (newest first)
/// are included only when `with_history` is set.
Json snapshot_json(const RSystem& sys, bool with_history);

/// {"step","dir","rule","pid","label","id","history_len"}; "id" only when
/// the event drew or consumed one.
Json trace_json(const TraceEvent& ev, std::size_t step);

/// {"choice":"deliver p1 p2","kind","pid","sender","message"}. The message
/// is the head of the queue a Deliver would move.
Json choice_json(const RSystem& sys, const StepChoice& c);

/// Accepts "local p1", "deliver p1 p2" or {"kind","pid","sender"}.
/// Throws std::invalid_argument.
StepChoice choice_from_json(const Json& j);

/// "t3" or "<t3>" or 3. Throws std::invalid_argument.
UniqueId unique_id_from_json(const Json& j);
/// "p3" or "<p3>" or 3. Throws std::invalid_argument.
Pid pid_from_json(const Json& j);

/// {"checked_states","violations":[{"choice_seq","diff"}],"truncated"}.
Json report_json(const CheckReport& r);

}  // namespace rerl
