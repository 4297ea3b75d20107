#pragma once

#include <string>
#include <string_view>

#include "sirmax/graph.hpp"

namespace sirmax {

// Plain-text instance format, one directive per line, '#' starts a comment:
//
//   n <int>                 node count; first directive
//   model ic|sir|tsir       required before any parameter line
//   T <int>                 round budget; required iff model = tsir (T >= 0)
//   gamma_default <float>   recovery probability for nodes without overrides
//   gamma <node> <float>    per-node recovery override
//   edge <src> <dst> <float>  directed edge with its probability
//
// Floats accept scientific notation.  Probabilities are serialized with 17
// significant digits, so parse(serialize(x)) reproduces x exactly.

// Throws std::runtime_error with a line number on malformed input.
Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst);

}  // namespace sirmax
