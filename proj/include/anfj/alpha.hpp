#pragma once

// The abstraction map induced by a policy: concrete pointers, frames,
// states and stores to their abstract counterparts.

#include "anfj/abstract.hpp"
#include "anfj/concrete.hpp"

namespace anfj::abstract {

Pointer alpha(const concrete::Pointer& p, const Policy& policy);
Value alpha(const concrete::Value& v, const Policy& policy);
Addr alpha(const concrete::Addr& a, const Policy& policy);
Frame alpha(const concrete::KontNode& k, const Policy& policy);
ControlState alpha(const concrete::State& s, const Policy& policy);
Store alpha(const concrete::Store& s, const Policy& policy);

/// Stack action of the concrete transition a -> b.
StackAction alpha_action(const concrete::State& a, const concrete::State& b,
                         const Policy& policy);

}  // namespace anfj::abstract
