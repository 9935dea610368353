#include "relbc/spacetime.hpp"

#include <sstream>
#include <utility>

#include "json.hpp"
#include "relbc/errors.hpp"

namespace relbc {

std::string_view station_name(StationId id) {
  switch (id) {
    case StationId::A1: return "A1";
    case StationId::A2: return "A2";
    case StationId::B1: return "B1";
    case StationId::B2: return "B2";
    case StationId::B3: return "B3";
  }
  return "?";
}

std::optional<StationId> parse_station(std::string_view name) {
  for (StationId id : kAllStations) {
    if (station_name(id) == name) return id;
  }
  return std::nullopt;
}

bool spacelike_separated(const SpacetimePoint& e1, const SpacetimePoint& e2, const Rational& c) {
  Rational dx = (e1.position - e2.position).abs();
  Rational dt = (e1.time - e2.time).abs();
  return dx > c * dt;
}

Geometry::Geometry(Rational separation, Rational signal_speed)
    : d_(std::move(separation)), c_(std::move(signal_speed)) {
  if (!(d_ > Rational(0))) throw ConfigError("geometry: separation d must be positive");
  if (!(c_ > Rational(0))) throw ConfigError("geometry: signal speed c must be positive");
  positions_[static_cast<std::size_t>(StationId::A1)] = Rational(0);
  positions_[static_cast<std::size_t>(StationId::B1)] = Rational(0);
  positions_[static_cast<std::size_t>(StationId::A2)] = d_;
  positions_[static_cast<std::size_t>(StationId::B2)] = d_;
}

void Geometry::place_b3(Rational position) {
  if (position < Rational(0) || position > d_) {
    throw ConfigError("geometry: B3 position must lie in [0, d]");
  }
  positions_[static_cast<std::size_t>(StationId::B3)] = std::move(position);
}

bool Geometry::has(StationId id) const { return positions_[static_cast<std::size_t>(id)].has_value(); }

const Rational& Geometry::position(StationId id) const {
  const auto& p = positions_[static_cast<std::size_t>(id)];
  if (!p) throw UnknownStation(std::string("geometry: station ") + std::string(station_name(id)) + " not placed");
  return *p;
}

Rational Geometry::distance(StationId a, StationId b) const { return (position(a) - position(b)).abs(); }

Rational Geometry::travel_time(StationId a, StationId b) const { return distance(a, b) / c_; }

std::string_view step_name(StepTag tag) {
  switch (tag) {
    case StepTag::KeyEstablished: return "key-established";
    case StepTag::ChallengeGenerated: return "challenge-generated";
    case StepTag::ChallengeIssue: return "challenge";
    case StepTag::CommitResponse: return "commit";
    case StepTag::CrossPair: return "cross";
    case StepTag::KeyDelivery: return "key-delivery";
    case StepTag::KeyRelay: return "key-relay";
    case StepTag::CommitEcho: return "commit-echo";
    case StepTag::Verdict: return "verdict";
    case StepTag::Intercept: return "intercept";
  }
  return "?";
}

Message deliver(std::vector<BitChain> payload, StationId sender, StationId receiver, StepTag step,
                const Rational& send_time, const Geometry& geometry) {
  if (send_time < Rational(0)) throw Error("deliver: send_time must be non-negative");
  Rational arrival = send_time + geometry.travel_time(sender, receiver);
  return Message{sender, receiver, step, std::move(payload), send_time, arrival};
}

SpacetimePoint Transcript::point_of(const TranscriptEvent& ev) const {
  return SpacetimePoint{geometry.position(ev.station), ev.time};
}

namespace {

std::string step_field(const TranscriptEvent& ev) {
  std::string s(step_name(ev.step));
  if (ev.kind == EventKind::Send) {
    s += ">";
    s += station_name(*ev.peer);
  } else if (ev.kind == EventKind::Receive) {
    s += "<";
    s += station_name(*ev.peer);
  }
  if (!ev.detail.empty()) {
    s += "=";
    s += ev.detail;
  }
  return s;
}

}  // namespace

std::string Transcript::to_text() const {
  std::ostringstream os;
  for (const auto& ev : events) {
    os << ev.time.to_decimal_string() << " | " << station_name(ev.station) << " | " << step_field(ev) << " | ";
    if (ev.payload.empty()) {
      os << "-";
    } else {
      for (std::size_t i = 0; i < ev.payload.size(); ++i) {
        if (i > 0) os << " ";
        os << ev.payload[i].to_hex_string();
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string Transcript::to_json() const {
  nlohmann::ordered_json root;
  root["c"] = geometry.signal_speed().to_fraction_string();
  root["d"] = geometry.separation().to_fraction_string();
  nlohmann::ordered_json evs = nlohmann::ordered_json::array();
  for (const auto& ev : events) {
    nlohmann::ordered_json e;
    e["time"] = ev.time.to_decimal_string();
    e["time_exact"] = ev.time.to_fraction_string();
    e["seq"] = ev.seq;
    e["station"] = std::string(station_name(ev.station));
    e["position"] = geometry.position(ev.station).to_fraction_string();
    switch (ev.kind) {
      case EventKind::Local: e["kind"] = "local"; break;
      case EventKind::Send: e["kind"] = "send"; break;
      case EventKind::Receive: e["kind"] = "receive"; break;
    }
    e["step"] = std::string(step_name(ev.step));
    if (!ev.detail.empty()) e["detail"] = ev.detail;
    if (ev.peer) e["peer"] = std::string(station_name(*ev.peer));
    if (ev.message_id != 0) e["message_id"] = ev.message_id;
    nlohmann::ordered_json payload = nlohmann::ordered_json::array();
    nlohmann::ordered_json payload_bits = nlohmann::ordered_json::array();
    for (const auto& chain : ev.payload) {
      payload.push_back(chain.to_hex_string());
      payload_bits.push_back(chain.to_binary_string());
    }
    e["payload"] = std::move(payload);
    e["payload_bits"] = std::move(payload_bits);
    evs.push_back(std::move(e));
  }
  root["events"] = std::move(evs);
  return root.dump();
}

Transcript truncated(const Transcript& transcript, const Rational& cutoff) {
  Transcript out;
  out.geometry = transcript.geometry;
  for (const auto& ev : transcript.events) {
    if (ev.time <= cutoff) out.events.push_back(ev);
  }
  return out;
}

Scheduler::Scheduler(Geometry geometry) { transcript_.geometry = std::move(geometry); }

void Scheduler::on_receive(StationId station, Handler handler) {
  handlers_[static_cast<std::size_t>(station)] = std::move(handler);
}

void Scheduler::set_processing_delay(StationId station, Rational delay) {
  if (delay < Rational(0)) throw ConfigError("scheduler: processing delay must be non-negative");
  processing_delay_[static_cast<std::size_t>(station)] = std::move(delay);
}

const Rational& Scheduler::processing_delay(StationId station) const {
  return processing_delay_[static_cast<std::size_t>(station)];
}

void Scheduler::check_future(const Rational& time) const {
  if (time < Rational(0)) throw CausalityViolation("scheduler: negative event time");
  if (time < now_) {
    throw CausalityViolation("scheduler: event at t=" + time.to_fraction_string() +
                             " scheduled from t=" + now_.to_fraction_string());
  }
}

void Scheduler::enqueue(TranscriptEvent ev) {
  ev.seq = next_seq_++;
  queue_.push(Queued{std::move(ev)});
}

void Scheduler::post_local(StationId station, Rational time, StepTag step, std::vector<BitChain> payload,
                           std::string detail) {
  check_future(time);
  TranscriptEvent ev;
  ev.time = std::move(time);
  ev.station = station;
  ev.kind = EventKind::Local;
  ev.step = step;
  ev.detail = std::move(detail);
  ev.payload = std::move(payload);
  enqueue(std::move(ev));
}

std::uint64_t Scheduler::post_message(StationId from, StationId to, Rational send_time, StepTag step,
                                      std::vector<BitChain> payload) {
  check_future(send_time);
  Message msg = deliver(std::move(payload), from, to, step, send_time, geometry());
  std::uint64_t id = next_message_id_++;

  TranscriptEvent send_ev;
  send_ev.time = msg.send_time;
  send_ev.station = from;
  send_ev.kind = EventKind::Send;
  send_ev.step = step;
  send_ev.payload = msg.payload;
  send_ev.peer = to;
  send_ev.message_id = id;
  enqueue(std::move(send_ev));

  TranscriptEvent recv_ev;
  recv_ev.time = msg.arrival_time;
  recv_ev.station = to;
  recv_ev.kind = EventKind::Receive;
  recv_ev.step = step;
  recv_ev.payload = std::move(msg.payload);
  recv_ev.peer = from;
  recv_ev.message_id = id;
  enqueue(std::move(recv_ev));
  return id;
}

Transcript Scheduler::run() {
  if (ran_) throw Error("scheduler: run() is single use");
  ran_ = true;
  while (!queue_.empty()) {
    TranscriptEvent ev = queue_.top().event;
    queue_.pop();
    now_ = ev.time;
    transcript_.events.push_back(ev);
    if (ev.kind == EventKind::Receive) {
      auto& handler = handlers_[static_cast<std::size_t>(ev.station)];
      if (handler) handler(transcript_.events.back(), *this);
    }
  }
  return std::move(transcript_);
}

}  // namespace relbc
