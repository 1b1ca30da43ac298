#pragma once

// Abstract state space: last-k times, finite pointers, join-only stores,
// frames, stack actions, and the one-step transition `next`.

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "anfj/program.hpp"

namespace anfj::abstract {

enum class Mode { Pushdown, Finite };

/// PerState keeps the store in node identity; PerNode keys nodes by control
/// state alone and joins every store that reaches it.
enum class StoreMode { PerState, PerNode };

struct Policy {
  int k = 0;
  bool objSensitivity = false;
  bool gc = true;
  bool liveness = true;
  Mode mode = Mode::Pushdown;
  StoreMode storeMode = StoreMode::PerState;
  std::size_t budgetNodes = 200000;
  std::size_t budgetEdges = 2000000;
  double budgetSeconds = 60.0;
};

std::string describe(const Policy& p);

/// Comma-separated overrides of `base`: k=N, obj, gc=on|off,
/// liveness=on|off, pushdown, finite, store=per-state|per-node.
/// Throws std::invalid_argument.
Policy parse_policy(std::string_view spec, Policy base = {});

/// Most recent labels first; at most k of them.
using Time = std::vector<Label>;

Time tick(Label l, const Time& t, const Policy& p);

struct Pointer {
  Label site = kNoLabel;
  Time time;
  Label recvSite = kNoLabel;  // only with objSensitivity
  auto operator<=>(const Pointer&) const = default;
};

/// fp0: the entry activation's frame pointer.
inline Pointer initial_fp() { return Pointer{}; }

Pointer alloc(Label l, const Time& t, Label recvSite, const Policy& p);

struct Value {
  Symbol cls;
  Pointer op;
  auto operator<=>(const Value&) const = default;
};

/// Ordered pointer-major, so a store's bindings at one pointer are contiguous.
struct Addr {
  Symbol base;
  Pointer ptr;
  std::strong_ordering operator<=>(const Addr& o) const {
    if (auto c = ptr <=> o.ptr; c != 0) return c;
    return base <=> o.base;
  }
  bool operator==(const Addr&) const = default;
};

using ValueSet = std::set<Value>;
using Store = std::map<Addr, ValueSet>;

const ValueSet& lookup(const Store& s, const Addr& a);
/// Pointwise union. Returns true if `into` grew.
bool join_into(Store& into, const Store& from);
bool join_into(Store& into, const Addr& a, const ValueSet& vs);
Store join(const Store& a, const Store& b);
bool leq(const Store& a, const Store& b);

struct Bottom {
  auto operator<=>(const Bottom&) const = default;
};
struct CallFrame {
  Symbol var;
  Label ret = kNoLabel;
  Pointer fp;
  auto operator<=>(const CallFrame&) const = default;
};
struct HandlerFrame {
  Symbol cls;
  Symbol var;
  Label handler = kNoLabel;
  Pointer fp;
  auto operator<=>(const HandlerFrame&) const = default;
};

/// Stack alphabet plus the bottom marker that stands for an empty stack in
/// top-frame summaries. Bottom is never pushed or popped.
using Frame = std::variant<Bottom, CallFrame, HandlerFrame>;

struct StackAction {
  enum class Kind { Epsilon, Push, Pop };
  Kind kind = Kind::Epsilon;
  Frame frame;  // Bottom for Epsilon
  auto operator<=>(const StackAction&) const = default;

  static StackAction eps() { return {}; }
  static StackAction push(Frame f) { return {Kind::Push, std::move(f)}; }
  static StackAction pop(Frame f) { return {Kind::Pop, std::move(f)}; }
};

struct ControlState {
  Label stmt = kNoLabel;
  Pointer fp;
  Time time;
  auto operator<=>(const ControlState&) const = default;
};

struct Successor {
  ControlState state;
  StackAction action;
  Store store;
};

/// Every abstract rule applied at `q` with `top` as the top frame (Bottom
/// for an empty stack). Successors with the same state and action are
/// merged by joining their stores. Unbound reads yield no successor; a
/// note is appended to `notes` when given.
std::vector<Successor> next(const LabeledProgram& lp, const ControlState& q,
                            const Store& store, const Frame& top,
                            const Policy& policy,
                            std::vector<std::string>* notes = nullptr);

/// Views are the top-first frames visible before and after one step.
StackAction decide_stack_action(const std::vector<Frame>& before,
                                const std::vector<Frame>& after);

std::string format(const Time& t);
std::string format(const Pointer& p);
std::string format(const LabeledProgram& lp, const Value& v);
std::string format(const LabeledProgram& lp, const Addr& a);
std::string format(const LabeledProgram& lp, const Frame& f);
std::string format(const LabeledProgram& lp, const StackAction& a);
std::string format(const ControlState& q);

/// Frame pointer of a call or handler frame; initial_fp() for Bottom.
const Pointer& frame_fp(const Frame& f);

}  // namespace anfj::abstract
