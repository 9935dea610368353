#pragma once

#include <optional>
#include <span>

#include "relbc/adversary.hpp"
#include "relbc/spacetime.hpp"

namespace relbc {

/// Union of everything the observer stations have generated or received,
/// over the whole transcript (or a truncation of it).
KnowledgeView view_of(const Transcript& transcript, std::span<const StationId> observers);

/// Earliest event time at which the observers' accumulated view determines
/// the committed bit, per the consistency oracle. nullopt when the bit is
/// never determined within the transcript.
std::optional<Rational> earliest_knowledge_time(const Transcript& transcript,
                                                std::span<const StationId> observers);

std::optional<Rational> earliest_knowledge_time(const Transcript& transcript, StationId observer);

}  // namespace relbc
