#pragma once

#include <string>

#include "lfa/markov.hpp"

namespace lfa::io {

/// Serializes a chain as JSON with exact rational transitions:
/// {"num_states": N, "labels": [...], "transitions": [[from, to, num, den], ...],
///  "events": [[from, to], ...]}. Output is deterministic (row order).
std::string to_json(const markov::Chain& chain);

/// Parses the schema above. Throws std::invalid_argument on malformed input
/// (bad indices, non-positive denominators, negative numerators, label count
/// mismatch, events outside the transition support).
markov::Chain from_json(const std::string& text);

/// Graphviz rendering with event edges drawn bold. Chains above 200 states
/// are rejected (std::invalid_argument): the output would be unreadable.
std::string to_dot(const markov::Chain& chain);

/// printf %.*g with `sig` significant digits ("nan"/"inf" spelled out).
std::string format_number(double value, int sig = 17);

}  // namespace lfa::io
