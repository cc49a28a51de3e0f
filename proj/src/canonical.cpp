#include "rerl/canonical.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>

namespace rerl {

namespace {

std::string values_to_string(const std::vector<Value>& vs) {
  std::string out = "[";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += vs[i].to_string();
  }
  return out + "]";
}

std::string tagged_to_string(const std::vector<TaggedMessage>& ms) {
  std::string out = "[";
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (i) out += ", ";
    out += ms[i].to_string();
  }
  return out + "]";
}

std::string checkpoint_token(const Checkpoint& c) {
  switch (c.kind) {
    case Checkpoint::Kind::Ch:
      return "#ch^" + Value::ref(UniqueId{c.id}).to_string();
    case Checkpoint::Kind::Alpha:
      return "#alpha^" + Value::ref(UniqueId{c.id}).to_string();
    case Checkpoint::Kind::Sp:
      return "#sp^" + Value::pid(Pid{c.id}).to_string();
  }
  return "?";
}

std::string pid_token(Pid p) { return Value::pid(p).to_string(); }

}  // namespace

std::string render(const System& sys) {
  std::string out;
  for (const auto& [pid, p] : sys.pool) {
    out += "P " + pid_token(pid) + " " + p.env.to_string() + " " + p.expr.to_string() + " " +
           values_to_string(p.mailbox) + "\n";
  }
  for (const auto& [key, q] : sys.gamma.queues()) {
    out += "G " + pid_token(key.first) + " " + pid_token(key.second) + " " +
           values_to_string(std::vector<Value>(q.begin(), q.end())) + "\n";
  }
  return out;
}

std::string render(const RSystem& sys) {
  std::string out;
  for (const auto& [pid, p] : sys.pool) {
    out += "P " + pid_token(pid) + " " + p.env.to_string() + " " + p.expr.to_string() + " " +
           tagged_to_string(p.mailbox);
    if (p.mark) {
      out += " mark{";
      bool first = true;
      for (const auto& c : *p.mark) {
        if (!first) out += ", ";
        first = false;
        out += checkpoint_token(c);
      }
      out += "}";
    }
    out += "\n";
  }
  for (const auto& [key, q] : sys.gamma.queues()) {
    out += "G " + pid_token(key.first) + " " + pid_token(key.second) + " " +
           tagged_to_string(std::vector<TaggedMessage>(q.begin(), q.end())) + "\n";
  }
  for (const auto& [pid, p] : sys.pool) {
    out += "H " + pid_token(pid);
    for (const HistoryEvent* ev : p.history.events()) out += " : " + ev->to_string();
    out += "\n";
  }
  return out;
}

std::string rename_identifiers(const std::string& text) {
  std::map<std::string, std::string> pids;
  std::map<std::string, std::string> ids;
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '\'') {
      std::size_t j = i + 1;
      while (j < n && text[j] != '\'') j += text[j] == '\\' ? 2 : 1;
      j = std::min(j + 1, n);
      out.append(text, i, j - i);
      i = j;
      continue;
    }
    if (c == '<' && i + 2 < n && (text[i + 1] == 'p' || text[i + 1] == 't') &&
        std::isdigit(static_cast<unsigned char>(text[i + 2]))) {
      std::size_t j = i + 2;
      while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < n && text[j] == '>') {
        std::string key = text.substr(i + 2, j - i - 2);
        auto& table = text[i + 1] == 'p' ? pids : ids;
        auto [it, fresh] = table.emplace(key, "");
        if (fresh) it->second = std::to_string(table.size());
        out += '<';
        out += text[i + 1];
        out += it->second;
        out += '>';
        i = j + 1;
        continue;
      }
    }
    out += c;
    ++i;
  }
  return out;
}

std::string canonicalize(const System& sys) { return rename_identifiers(render(sys)); }
std::string canonicalize(const RSystem& sys) { return rename_identifiers(render(sys)); }

std::string digest(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string first_difference(const std::string& a, const std::string& b) {
  if (a == b) return "";
  std::istringstream x(a), y(b);
  std::string lx, ly;
  for (;;) {
    bool gx = static_cast<bool>(std::getline(x, lx));
    bool gy = static_cast<bool>(std::getline(y, ly));
    if (!gx && !gy) return "";
    if (!gx) lx = "<none>";
    if (!gy) ly = "<none>";
    if (lx != ly) return "expected: " + lx + "\n  actual: " + ly;
  }
}

}  // namespace rerl
