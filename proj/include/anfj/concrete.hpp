#pragma once

// Reference interpreter: the small-step machine over
// (stmt, fp, store, kont, time) with full-history time stamps.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "anfj/program.hpp"

namespace anfj::concrete {

/// One entry of the execution history. Time is the chain ending here;
/// `serial` makes every tick distinct, so alloc(l, t) is always fresh.
struct History {
  Label label = kNoLabel;
  mutable std::shared_ptr<const History> prev;
  std::uint64_t serial = 0;
  ~History();
};
using Time = std::shared_ptr<const History>;

/// The most recent `k` labels of `t`, newest first.
std::vector<Label> last_labels(const Time& t, std::size_t k);

/// Frame or object pointer: allocation label, the time it was made at, and
/// the allocation site of the receiver whose activation made it (kept so
/// the object-sensitive abstraction is a function of the concrete state).
struct Pointer {
  Label site = kNoLabel;
  Time time;
  Label recvSite = kNoLabel;

  std::uint64_t serial() const { return time ? time->serial : 0; }
  bool operator==(const Pointer& o) const {
    return site == o.site && serial() == o.serial() && recvSite == o.recvSite;
  }
  bool operator<(const Pointer& o) const {
    if (serial() != o.serial()) return serial() < o.serial();
    if (site != o.site) return site < o.site;
    return recvSite < o.recvSite;
  }
};

struct Value {
  Symbol cls;
  Pointer op;
  bool operator==(const Value&) const = default;
};

struct Addr {
  Symbol base;
  Pointer ptr;
  bool operator==(const Addr&) const = default;
  bool operator<(const Addr& o) const {
    if (ptr < o.ptr) return true;
    if (o.ptr < ptr) return false;
    return base < o.base;
  }
};

using Store = std::map<Addr, Value>;

struct FunFrame {
  Symbol var;
  Label ret = kNoLabel;
  Pointer fp;
};
struct HandleFrame {
  Symbol cls;
  Symbol var;
  Label handler = kNoLabel;
  Pointer fp;
};

struct KontNode;
using Kont = std::shared_ptr<const KontNode>;  // nullptr is halt
struct KontNode {
  std::variant<FunFrame, HandleFrame> frame;
  mutable Kont next;
  std::size_t depth = 1;
  ~KontNode();
};

std::size_t kont_depth(const Kont& k);

struct State {
  Label stmt = kNoLabel;
  Pointer fp;
  std::shared_ptr<const Store> store;
  Kont kont;
  Time time;
};

struct Halted { Value value; };
struct Uncaught { Value value; };
struct Stuck { std::string reason; };
struct FuelExhausted {};

struct Outcome {
  std::variant<Halted, Uncaught, Stuck, FuelExhausted> kind;
  State last;
  std::size_t steps = 0;

  std::string describe(const LabeledProgram& lp) const;
};

/// Entry method's first statement, fp0, empty store, halt, empty time.
State inject(const LabeledProgram& lp);

/// Successor of `s`, or the terminal outcome when there is none.
std::variant<State, Outcome> step(const LabeledProgram& lp, const State& s);

/// Field bindings made by `new C(args)` against object pointer `op`,
/// super constructors included.
std::vector<std::pair<Addr, Value>> apply_constructor(
    const LabeledProgram& lp, Symbol cls, const Pointer& op,
    const std::vector<Value>& args);

struct RunResult {
  Outcome outcome;
  std::vector<State> trace;  // empty unless requested; includes the final state
};

inline constexpr std::size_t kDefaultFuel = 100000;

RunResult run(const LabeledProgram& lp, std::size_t fuel = kDefaultFuel,
              bool keepTrace = false);

std::string format_pointer(const Pointer& p);

}  // namespace anfj::concrete
