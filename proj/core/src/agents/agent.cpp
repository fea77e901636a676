#include "dtar/agents/agent.hpp"

#include <algorithm>
#include <cctype>

namespace dtar::agents {

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kDtar:
      return "DTAR";
    case AgentKind::kDtarMlp:
      return "DTAR_MLP";
    case AgentKind::kDtarRandPart:
      return "DTAR_RANDPART";
    case AgentKind::kDijkstra:
      return "DIJKSTRA";
    case AgentKind::kElb:
      return "ELB";
    case AgentKind::kQrlsn:
      return "QRLSN";
    case AgentKind::kCdparDqn:
      return "CDPAR_DQN";
  }
  return "UNKNOWN";
}

const std::vector<AgentKind>& all_agent_kinds() {
  static const std::vector<AgentKind> kinds{AgentKind::kDtar,     AgentKind::kDtarMlp, AgentKind::kDtarRandPart,
                                            AgentKind::kDijkstra, AgentKind::kElb,     AgentKind::kQrlsn,
                                            AgentKind::kCdparDqn};
  return kinds;
}

std::optional<AgentKind> parse_agent_kind(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "CDPAR") return AgentKind::kCdparDqn;
  for (AgentKind k : all_agent_kinds())
    if (to_string(k) == upper) return k;
  return std::nullopt;
}

bool is_learned(AgentKind kind) { return kind != AgentKind::kDijkstra && kind != AgentKind::kElb; }

bool is_masked(AgentKind kind) { return is_learned(kind); }

}  // namespace dtar::agents
