#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pcsbb/simnet.hpp"

// Structural leakage audit over a run's trace. The wire vocabulary is
// closed: command payloads are empty, index payloads carry one agent index,
// everything else is ciphertext-domain material or GF(2)-masked bits. A
// domain value, a CPA cost, a bound, or a matrix entry has no slot to ride
// in; the audit verifies each event against that vocabulary plus the flow
// directions the protocol allows, optionally restricted to what a coalition
// of agents can see.

namespace pcsbb {

struct AuditReport {
  bool passed = true;
  std::uint64_t events = 0;
  std::map<PayloadKind, std::uint64_t> kind_counts;
  std::vector<std::string> violations;

  void fail(std::uint64_t step, const std::string& what) {
    passed = false;
    if (violations.size() < 50) {
      violations.push_back("step " + std::to_string(step) + ": " + what);
    }
  }
};

inline AuditReport audit_trace(std::span<const TraceEvent> trace, int n,
                               const std::set<int>* coalition = nullptr) {
  AuditReport report;
  for (const auto& e : trace) {
    if (coalition && !coalition->count(e.sender) && !coalition->count(e.receiver)) {
      continue;
    }
    ++report.events;
    ++report.kind_counts[e.kind];

    if (e.sender < 0 || e.sender >= n || e.receiver < 0 || e.receiver >= n ||
        e.sender == e.receiver) {
      report.fail(e.step, "bad endpoints");
      continue;
    }
    if (e.kind != kind_of(e.tag)) {
      report.fail(e.step, std::string(tag_name(e.tag)) + " carries " +
                              std::string(kind_name(e.kind)) + " payload");
      continue;
    }
    switch (e.kind) {
      case PayloadKind::Command:
        if (e.bytes != 0) report.fail(e.step, "command with payload bytes");
        break;
      case PayloadKind::Index:
        if (e.bytes != 4) report.fail(e.step, "index payload of unexpected size");
        // In-memory traces expose the index value itself; it must be an
        // agent id, nothing else fits in this slot.
        if (e.aux >= 0 && e.aux >= n) report.fail(e.step, "index outside agent range");
        break;
      case PayloadKind::Ciphertext:
        if (e.bytes < 64) report.fail(e.step, "ciphertext payload too small");
        break;
      case PayloadKind::MaskedBits:
        if (e.bytes < 1) report.fail(e.step, "empty masked-bit payload");
        break;
    }
    switch (e.tag) {
      case MsgTag::Cpa:
        if (e.receiver != e.sender + 1) report.fail(e.step, "CPA off the chain");
        break;
      case MsgTag::Backtrack:
        if (e.receiver != e.sender - 1) report.fail(e.step, "backtrack off the chain");
        break;
      case MsgTag::YValue:
      case MsgTag::ZeroShare:
        if (e.receiver >= e.sender) report.fail(e.step, "share data sent forward");
        break;
      case MsgTag::ZVector:
      case MsgTag::PubKey:
        if (e.receiver <= e.sender) report.fail(e.step, "key material sent backward");
        break;
      default:
        break;
    }
  }
  return report;
}

inline std::set<int> parse_coalition(const std::string& csv) {
  std::set<int> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    std::string tok = csv.substr(pos, comma - pos);
    if (!tok.empty()) out.insert(std::stoi(tok) - 1);  // 1-based on the CLI
    pos = comma + 1;
  }
  return out;
}

}  // namespace pcsbb
