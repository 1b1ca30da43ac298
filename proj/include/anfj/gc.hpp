#pragma once

// Abstract garbage collection with liveness-pruned roots.

#include <set>

#include "anfj/abstract.hpp"

namespace anfj::abstract {

using AddrSet = std::set<Addr>;

/// Variable addresses at the frame pointers of the call frames in `frames`.
/// Handler frames contribute nothing.
AddrSet stack_root(const std::set<Frame>& frames, const Store& store);

/// Roots at `q`: its live variables (all of its variables with liveness off)
/// plus stack_root. Handler frames additionally root the variables live at
/// their handler head, at their own frame pointer, since control may resume
/// there after the frames above are unwound.
AddrSet root(const ControlState& q, const Store& store, const std::set<Frame>& frames,
             const LabeledProgram& lp, const Policy& policy);

/// Closure of `roots` under a ~> (f, op) for every (C, op) in store(a).
AddrSet reachable(const AddrSet& roots, const Store& store);

/// `store` restricted to reachable(root(...)); identity when gc is off.
Store eagc(const ControlState& q, const Store& store, const std::set<Frame>& frames,
           const LabeledProgram& lp, const Policy& policy);

}  // namespace anfj::abstract
