#include "relbc/knowledge.hpp"

#include <algorithm>

namespace relbc {

namespace {

bool observes(std::span<const StationId> observers, StationId station) {
  return std::find(observers.begin(), observers.end(), station) != observers.end();
}

}  // namespace

KnowledgeView view_of(const Transcript& transcript, std::span<const StationId> observers) {
  KnowledgeView view;
  for (const auto& ev : transcript.events) {
    if (observes(observers, ev.station)) view.ingest(ev);
  }
  return view;
}

std::optional<Rational> earliest_knowledge_time(const Transcript& transcript,
                                                std::span<const StationId> observers) {
  KnowledgeView view;
  for (const auto& ev : transcript.events) {
    if (!observes(observers, ev.station)) continue;
    if (ev.kind == EventKind::Send) continue;
    view.ingest(ev);
    if (single_station_decidability(view)) return ev.time;
  }
  return std::nullopt;
}

std::optional<Rational> earliest_knowledge_time(const Transcript& transcript, StationId observer) {
  return earliest_knowledge_time(transcript, std::span<const StationId>(&observer, 1));
}

}  // namespace relbc
