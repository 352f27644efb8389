#pragma once

#include <cstdint>
#include <deque>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pcsbb/dcop.hpp"
#include "pcsbb/paillier.hpp"

namespace pcsbb {

enum class MsgTag : std::uint8_t {
  PubKey,
  ZVector,
  YValue,
  ZeroShare,
  Cpa,
  Backtrack,
  NewOptimum,
  Complete,
  MaskedBits,
};

// What a payload structurally is. Agents never put a domain value, a cost,
// a bound, or a matrix entry on the wire; the kinds below are the whole
// vocabulary.
enum class PayloadKind : std::uint8_t { Command, Index, Ciphertext, MaskedBits };

inline std::string_view tag_name(MsgTag t) {
  switch (t) {
    case MsgTag::PubKey: return "PUBKEY";
    case MsgTag::ZVector: return "Z_VECTOR";
    case MsgTag::YValue: return "Y_VALUE";
    case MsgTag::ZeroShare: return "ZERO_SHARE_MSG";
    case MsgTag::Cpa: return "CPA_MSG";
    case MsgTag::Backtrack: return "BACKTRACK_MSG";
    case MsgTag::NewOptimum: return "NEW_OPTIMUM_FOUND";
    case MsgTag::Complete: return "COMPLETE";
    case MsgTag::MaskedBits: return "MASKED_BITS";
  }
  return "?";
}

inline std::optional<MsgTag> tag_from_name(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(MsgTag::MaskedBits); ++i) {
    MsgTag t = static_cast<MsgTag>(i);
    if (tag_name(t) == s) return t;
  }
  return std::nullopt;
}

inline std::string_view kind_name(PayloadKind k) {
  switch (k) {
    case PayloadKind::Command: return "command";
    case PayloadKind::Index: return "index";
    case PayloadKind::Ciphertext: return "ciphertext";
    case PayloadKind::MaskedBits: return "masked-bits";
  }
  return "?";
}

inline std::optional<PayloadKind> kind_from_name(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(PayloadKind::MaskedBits); ++i) {
    PayloadKind k = static_cast<PayloadKind>(i);
    if (kind_name(k) == s) return k;
  }
  return std::nullopt;
}

inline PayloadKind kind_of(MsgTag t) {
  switch (t) {
    case MsgTag::PubKey:
    case MsgTag::ZVector:
    case MsgTag::YValue: return PayloadKind::Ciphertext;
    case MsgTag::ZeroShare: return PayloadKind::Index;
    case MsgTag::MaskedBits: return PayloadKind::MaskedBits;
    default: return PayloadKind::Command;
  }
}

struct Message {
  MsgTag tag = MsgTag::Cpa;
  int sender = -1;
  int receiver = -1;  // -1 while still a broadcast template
  std::uint64_t payload_bytes = 0;

  // Payload slots; only the one matching the tag is used.
  int index = -1;                          // ZeroShare
  PaillierPublicKey pubkey;                // PubKey
  std::vector<Ciphertext> cells;           // ZVector
  Ciphertext cipher;                       // YValue

  static Message command(MsgTag t, int from, int to = -1) {
    Message m;
    m.tag = t;
    m.sender = from;
    m.receiver = to;
    m.payload_bytes = 0;
    return m;
  }

  static Message zero_share(int from, int to, int idx) {
    Message m;
    m.tag = MsgTag::ZeroShare;
    m.sender = from;
    m.receiver = to;
    m.index = idx;
    m.payload_bytes = 4;
    return m;
  }

  static Message pub_key(int from, int to, const PaillierPublicKey& pk) {
    Message m;
    m.tag = MsgTag::PubKey;
    m.sender = from;
    m.receiver = to;
    m.pubkey = pk;
    m.payload_bytes = pk.key_bytes();
    return m;
  }

  static Message z_vector(int from, int to, std::vector<Ciphertext> cells,
                          std::size_t bytes_per_cell) {
    Message m;
    m.tag = MsgTag::ZVector;
    m.sender = from;
    m.receiver = to;
    m.payload_bytes = cells.size() * bytes_per_cell;
    m.cells = std::move(cells);
    return m;
  }

  static Message y_value(int from, int to, Ciphertext c, std::size_t bytes) {
    Message m;
    m.tag = MsgTag::YValue;
    m.sender = from;
    m.receiver = to;
    m.cipher = std::move(c);
    m.payload_bytes = bytes;
    return m;
  }
};

struct TraceEvent {
  std::uint64_t step = 0;
  int sender = -1;
  int receiver = -1;
  MsgTag tag = MsgTag::Cpa;
  PayloadKind kind = PayloadKind::Command;
  std::uint64_t bytes = 0;
  int aux = -1;  // index value for Index payloads; not serialized
};

// In-process mailbox network: one global FIFO, so per-channel delivery order
// equals send order and the event loop is deterministic.
class SimNet {
 public:
  explicit SimNet(int n, bool capture_trace = true)
      : n_(n), capture_(capture_trace) {
    if (n < 1) throw std::invalid_argument("SimNet: need at least one agent");
  }

  int agents() const { return n_; }

  void send(Message m) {
    check_endpoint(m.sender);
    check_endpoint(m.receiver);
    queue_.push_back(std::move(m));
  }

  // Delivers copies to every agent except the sender.
  void broadcast(Message m) {
    check_endpoint(m.sender);
    for (int to = 0; to < n_; ++to) {
      if (to == m.sender) continue;
      Message copy = m;
      copy.receiver = to;
      queue_.push_back(std::move(copy));
    }
  }

  std::optional<Message> deliver_next() {
    if (queue_.empty()) return std::nullopt;
    Message m = std::move(queue_.front());
    queue_.pop_front();
    record(m.sender, m.receiver, m.tag, kind_of(m.tag), m.payload_bytes, m.index);
    return m;
  }

  bool empty() const { return queue_.empty(); }

  // Traffic carried by a sub-protocol rather than the mailbox (the masked
  // openings of the comparison backend).
  void record_external(int from, int to, MsgTag tag, std::uint64_t bytes) {
    record(from, to, tag, kind_of(tag), bytes, -1);
  }

  std::uint64_t delivered() const { return delivered_; }
  std::uint64_t bytes() const { return bytes_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }

 private:
  void check_endpoint(int a) const {
    if (a < 0 || a >= n_) throw std::invalid_argument("SimNet: unregistered agent");
  }

  void record(int from, int to, MsgTag tag, PayloadKind kind, std::uint64_t bytes,
              int aux) {
    bytes_ += bytes;
    std::uint64_t step = delivered_++;
    if (capture_) trace_.push_back({step, from, to, tag, kind, bytes, aux});
  }

  int n_;
  bool capture_;
  std::deque<Message> queue_;
  std::vector<TraceEvent> trace_;
  std::uint64_t delivered_ = 0;
  std::uint64_t bytes_ = 0;
};

// step | A<sender> -> A<receiver> | tag | payload-kind | payload-bytes
inline void write_trace(std::ostream& os, const std::vector<TraceEvent>& trace) {
  for (const auto& e : trace) {
    os << e.step << " | A" << (e.sender + 1) << " -> A" << (e.receiver + 1)
       << " | " << tag_name(e.tag) << " | " << kind_name(e.kind) << " | "
       << e.bytes << '\n';
  }
}

inline std::vector<TraceEvent> parse_trace(std::istream& in) {
  std::vector<TraceEvent> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    TraceEvent e;
    std::string sep, from, arrow, to, tag, kind;
    if (!(ls >> e.step >> sep >> from >> arrow >> to >> sep >> tag >> sep >> kind >>
          sep >> e.bytes)) {
      throw ParseError(lineno, "malformed trace line");
    }
    if (from.size() < 2 || from[0] != 'A' || to.size() < 2 || to[0] != 'A') {
      throw ParseError(lineno, "malformed agent id");
    }
    e.sender = std::stoi(from.substr(1)) - 1;
    e.receiver = std::stoi(to.substr(1)) - 1;
    auto t = tag_from_name(tag);
    auto k = kind_from_name(kind);
    if (!t || !k) throw ParseError(lineno, "unknown tag or payload kind");
    e.tag = *t;
    e.kind = *k;
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulated time.
// ---------------------------------------------------------------------------

struct RunMetrics {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::uint64_t setup_messages = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t new_optima = 0;
  std::uint64_t paillier_encrypts = 0;
  std::uint64_t paillier_decrypts = 0;
  std::uint64_t paillier_hom_ops = 0;
  std::uint64_t offline_triples = 0;
  std::uint64_t online_rounds = 0;
  std::uint64_t online_bits = 0;
  double sim_time_ms = 0.0;

  std::uint64_t paillier_ops() const {
    return paillier_encrypts + paillier_decrypts + paillier_hom_ops;
  }
};

// Per-unit costs for the simulated-time estimate. Defaults put one
// comparison (offline + online) at 7.2ms, the measured scale of a five-party
// deployment on LAN hardware.
struct CostModel {
  double per_message_ms = 0.05;
  double per_byte_ms = 1e-6;
  double per_paillier_op_ms = 0.01;
  double compare_offline_ms = 6.7;
  double compare_online_ms = 0.51;
  // Optional detailed online model; used instead of compare_online_ms when
  // either is nonzero and round/bit counts are available.
  double online_round_ms = 0.0;
  double online_bit_ms = 0.0;

  static CostModel from_stream(std::istream& in) {
    CostModel m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      std::size_t eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(lineno, "expected key=value");
      std::string key = line.substr(start, eq - start);
      key.erase(key.find_last_not_of(" \t") + 1);
      double value = std::stod(line.substr(eq + 1));
      if (value < 0) throw ParseError(lineno, "negative cost");
      if (key == "per_message_ms") m.per_message_ms = value;
      else if (key == "per_byte_ms") m.per_byte_ms = value;
      else if (key == "per_paillier_op_ms") m.per_paillier_op_ms = value;
      else if (key == "compare_offline_ms") m.compare_offline_ms = value;
      else if (key == "compare_online_ms") m.compare_online_ms = value;
      else if (key == "online_round_ms") m.online_round_ms = value;
      else if (key == "online_bit_ms") m.online_bit_ms = value;
      else throw ParseError(lineno, "unknown cost key '" + key + "'");
    }
    return m;
  }

  static CostModel from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cost model: cannot open " + path);
    return from_stream(in);
  }
};

inline double simulated_time_ms(const std::vector<TraceEvent>& trace,
                                const RunMetrics& metrics, const CostModel& model) {
  (void)trace;  // all counts are carried in the metrics
  double t = 0;
  t += static_cast<double>(metrics.messages) * model.per_message_ms;
  t += static_cast<double>(metrics.bytes) * model.per_byte_ms;
  t += static_cast<double>(metrics.paillier_ops()) * model.per_paillier_op_ms;
  t += static_cast<double>(metrics.comparisons) * model.compare_offline_ms;
  if ((model.online_round_ms > 0 || model.online_bit_ms > 0) &&
      (metrics.online_rounds > 0 || metrics.online_bits > 0)) {
    t += static_cast<double>(metrics.online_rounds) * model.online_round_ms;
    t += static_cast<double>(metrics.online_bits) * model.online_bit_ms;
  } else {
    t += static_cast<double>(metrics.comparisons) * model.compare_online_ms;
  }
  return t;
}

}  // namespace pcsbb
