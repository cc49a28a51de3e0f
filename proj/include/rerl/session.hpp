#pragma once

// Debugging sessions behind a method/path/body interface, independent of
// any transport. Routes live under /v1/sessions.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rerl/json_io.hpp"

namespace rerl {

struct Response {
  int status = 200;
  Json body;  // null for 204
};

class SessionService {
 public:
  /// With `persist_dir`, every state a session reaches is written to
  /// <dir>/<id>/<nnnnnn>.json, next to the session's source.
  explicit SessionService(std::optional<std::string> persist_dir = std::nullopt);

  Response handle(const std::string& method, const std::string& path, const std::string& body);

 private:
  struct Session {
    std::mutex mu;
    std::string source;
    RSystem sys;
    std::vector<RSystem> undo;
    std::size_t step = 0;  // events emitted so far
    std::size_t saved = 0; // snapshots written so far
  };

  Response create(const std::string& body);
  Response on_session(Session& s, const std::string& id, const std::string& method, const std::string& action,
                      const std::string& body);
  void persist(const std::string& id, Session& s);

  std::optional<std::string> persist_dir_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// State payload of a session: the snapshot with histories.
Json session_state(const RSystem& sys);

/// Enabled forward choices plus, per marked process, the rule bstep would
/// apply ("Stuck" when the rollback cannot proceed).
Json session_choices(const RSystem& sys);

}  // namespace rerl
