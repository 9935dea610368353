#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "relbc/bitchain.hpp"
#include "relbc/rational.hpp"

namespace relbc {

enum class StationId : std::uint8_t { A1, A2, B1, B2, B3 };

inline constexpr std::array<StationId, 5> kAllStations{StationId::A1, StationId::A2, StationId::B1,
                                                       StationId::B2, StationId::B3};

std::string_view station_name(StationId id);
std::optional<StationId> parse_station(std::string_view name);

/// A positioned instant on the shared 1-D line, in meters and seconds.
struct SpacetimePoint {
  Rational position;
  Rational time;
};

/// True iff no signal at speed <= c connects the two events:
/// |dx| > c*|dt|, strictly. The lightlike boundary is not spacelike.
bool spacelike_separated(const SpacetimePoint& e1, const SpacetimePoint& e2, const Rational& c);

/// Station layout of one run: A1,B1 at 0 and A2,B2 at d (the co-located
/// pairs of the protocol), plus an optional interception station B3.
class Geometry {
 public:
  Geometry() : Geometry(Rational(300000000), Rational(299792458)) {}
  Geometry(Rational separation, Rational signal_speed);

  /// Places B3; position must lie within [0, d].
  void place_b3(Rational position);

  bool has(StationId id) const;
  const Rational& position(StationId id) const;  // throws UnknownStation
  const Rational& separation() const { return d_; }
  const Rational& signal_speed() const { return c_; }

  Rational distance(StationId a, StationId b) const;
  Rational travel_time(StationId a, StationId b) const;

 private:
  Rational d_;
  Rational c_;
  std::array<std::optional<Rational>, 5> positions_;
};

/// Protocol step names used to tag transcript events.
enum class StepTag : std::uint8_t {
  KeyEstablished,      // Alice's pre-shared key comes into existence
  ChallengeGenerated,  // B-side station draws its challenge pair
  ChallengeIssue,      // B_i -> A_i: (x_0, x_1)
  CommitResponse,      // A_i -> B_i: key XOR x_b
  CrossPair,           // B_i -> far side: (commitment XOR x_0, commitment XOR x_1)
  KeyDelivery,         // A2 -> B2: key (subordinate variant)
  KeyRelay,            // B2 -> B1/B3: key (subordinate variant)
  CommitEcho,          // B1 -> B3: its held challenge + commitment (subordinate variant)
  Verdict,             // local classification at B1/B2
  Intercept,           // local early determination at B3
};

std::string_view step_name(StepTag tag);

enum class EventKind : std::uint8_t { Local, Send, Receive };

/// A positioned, timestamped message between stations. The arrival time is
/// always send_time + distance/c, exactly.
struct Message {
  StationId sender;
  StationId receiver;
  StepTag step;
  std::vector<BitChain> payload;
  Rational send_time;
  Rational arrival_time;
};

/// Builds the Message for a payload handed to the channel at send_time.
Message deliver(std::vector<BitChain> payload, StationId sender, StationId receiver, StepTag step,
                const Rational& send_time, const Geometry& geometry);

struct TranscriptEvent {
  Rational time;
  std::uint64_t seq = 0;  // tie-break for equal times, assigned at enqueue
  StationId station;
  EventKind kind = EventKind::Local;
  StepTag step = StepTag::Verdict;
  std::string detail;  // e.g. verdict text; empty for plain steps
  std::vector<BitChain> payload;
  std::optional<StationId> peer;  // other endpoint for Send/Receive
  std::uint64_t message_id = 0;   // pairs one Send with its Receive
};

/// Totally ordered event log of one run, ordered by (time, seq).
struct Transcript {
  std::vector<TranscriptEvent> events;

  SpacetimePoint point_of(const TranscriptEvent& ev) const;
  /// One event per line: `time(sec, decimal) | station | step-tag | payload(hex/len)`.
  std::string to_text() const;
  /// Structured export mirroring the same fields, plus exact times.
  std::string to_json() const;

  Geometry geometry;
};

/// Keeps events at time <= cutoff (the prefix an observer has seen by then).
Transcript truncated(const Transcript& transcript, const Rational& cutoff);

/// Deterministic discrete-event loop. Receive events are dispatched to the
/// receiver's handler; handlers may only schedule at or after the current
/// event time. Processing order is (time, enqueue seq).
class Scheduler {
 public:
  using Handler = std::function<void(const TranscriptEvent&, Scheduler&)>;

  explicit Scheduler(Geometry geometry);

  const Geometry& geometry() const { return transcript_.geometry; }
  const Rational& now() const { return now_; }

  void on_receive(StationId station, Handler handler);
  void set_processing_delay(StationId station, Rational delay);
  const Rational& processing_delay(StationId station) const;

  void post_local(StationId station, Rational time, StepTag step, std::vector<BitChain> payload = {},
                  std::string detail = {});
  /// Schedules the Send event and its Receive at arrival time; returns the
  /// message id shared by the pair.
  std::uint64_t post_message(StationId from, StationId to, Rational send_time, StepTag step,
                             std::vector<BitChain> payload);

  /// Drains the queue and returns the completed transcript. Single use.
  Transcript run();

 private:
  struct Queued {
    TranscriptEvent event;
    bool operator>(const Queued& o) const {
      if (event.time != o.event.time) return o.event.time < event.time;
      return event.seq > o.event.seq;
    }
  };

  void enqueue(TranscriptEvent ev);
  void check_future(const Rational& time) const;

  Transcript transcript_;
  std::priority_queue<Queued, std::vector<Queued>, std::greater<>> queue_;
  std::array<Handler, 5> handlers_{};
  std::array<Rational, 5> processing_delay_{};
  Rational now_{0};
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_message_id_ = 1;
  bool ran_ = false;
};

}  // namespace relbc
