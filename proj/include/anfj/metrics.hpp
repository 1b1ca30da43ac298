#pragma once

// Precision and size metrics over a finished DSG, plus the concrete
// counterpart of exception-to-catch links.

#include <compare>
#include <optional>
#include <set>
#include <string>

#include "anfj/concrete.hpp"
#include "anfj/dsg.hpp"

namespace anfj::metrics {

using abstract::DSG;

/// Where an exception enters the frame that catches it: the throw itself
/// when thrown in the handler's own activation, otherwise the call site the
/// exception propagated out of.
struct RaisePoint {
  bool local = true;
  Label site = kNoLabel;
  auto operator<=>(const RaisePoint&) const = default;
};

struct EcLink {
  Label throwLabel = kNoLabel;
  RaisePoint from;
  Label handler = kNoLabel;  // handler head label
  auto operator<=>(const EcLink&) const = default;
};

/// Addresses bound in any node store (stores after collection), unioned.
abstract::Store points_to(const DSG& g);

/// Classes of values read by some throw statement in some node.
std::set<Symbol> exception_classes(const LabeledProgram& lp, const DSG& g);

/// Mean number of non-exception (resp. exception) values per address,
/// over addresses holding at least one such value. Empty when none do.
std::optional<double> var_points_to(const LabeledProgram& lp, const DSG& g);
std::optional<double> throws(const LabeledProgram& lp, const DSG& g);

std::set<EcLink> ec_links(const LabeledProgram& lp, const DSG& g);
std::set<EcLink> concrete_ec_links(const LabeledProgram& lp,
                                   const std::vector<concrete::State>& trace);

/// Links per throw statement, over throw statements with at least one link.
std::optional<double> average_links(const std::set<EcLink>& links);

struct Report {
  std::string policy;
  std::optional<double> varPointsTo;
  std::optional<double> throws;
  std::optional<double> avgLinks;
  std::set<EcLink> links;
  std::size_t nodes = 0;
  std::size_t edges = 0;     // step edges, summaries excluded
  std::size_t methods = 0;   // methods with at least one node
  double seconds = 0;
  std::vector<std::string> notes;
};

Report report(const LabeledProgram& lp, const DSG& g);

/// b relative to a for the cardinality rows; a relative to b for graph size.
struct Ratios {
  std::optional<double> varPointsTo, throws, avgLinks, nodes, edges;
};

Ratios ratios(const Report& a, const Report& b);

std::string format(const LabeledProgram& lp, const EcLink& l);

}  // namespace anfj::metrics
