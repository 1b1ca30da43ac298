#pragma once

// Deterministic JSON and Graphviz DOT renderings of a DSG.

#include <string>

#include "anfj/dsg.hpp"

namespace anfj::abstract {

std::string to_json(const LabeledProgram& lp, const DSG& g);
std::string to_dot(const LabeledProgram& lp, const DSG& g);

/// Inverse of to_json for the exported fields (policy, nodes, edges, initial,
/// top frames and stack frames). Names are resolved against `lp`.
DSG dsg_from_json(const LabeledProgram& lp, const std::string& text);

/// Equality over the exported fields.
bool same_exported(const DSG& a, const DSG& b);

}  // namespace anfj::abstract
