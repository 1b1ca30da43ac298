// anfj: run, analyze and compare ANF-J programs.
//
// Exit status: 0 ok, 1 input error, 2 budget (analysis budget or fuel).

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "anfj/concrete.hpp"
#include "anfj/dsg.hpp"
#include "anfj/errors.hpp"
#include "anfj/export.hpp"
#include "anfj/metrics.hpp"
#include "anfj/parser.hpp"

namespace {

using nlohmann::json;
using namespace anfj;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LabeledProgram load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return elaborate(parse_program(ss.str()));
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string show(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os.precision(4);
  os << *v;
  return os.str();
}

json report_json(const LabeledProgram& lp, const metrics::Report& r) {
  json links = json::array();
  for (const auto& l : r.links) links.push_back(metrics::format(lp, l));
  return json{{"policy", r.policy},       {"nodes", r.nodes},
              {"edges", r.edges},         {"methods", r.methods},
              {"varPointsTo", opt(r.varPointsTo)}, {"throws", opt(r.throws)},
              {"avgLinks", opt(r.avgLinks)},       {"links", links},
              {"seconds", r.seconds},     {"notes", r.notes}};
}

void print_report(const LabeledProgram& lp, const metrics::Report& r) {
  std::cout << "policy       " << r.policy << "\n"
            << "nodes        " << r.nodes << "\n"
            << "edges        " << r.edges << "\n"
            << "methods      " << r.methods << "\n"
            << "VarPointsTo  " << show(r.varPointsTo) << "\n"
            << "Throws       " << show(r.throws) << "\n"
            << "E-C links    " << show(r.avgLinks) << " avg, " << r.links.size() << " total\n";
  for (const auto& l : r.links) std::cout << "  " << metrics::format(lp, l) << "\n";
  for (const auto& n : r.notes) std::cout << "note: " << n << "\n";
  std::cout << "seconds      " << r.seconds << "\n";
}

int cmd_run(const std::string& file, std::size_t fuel, bool trace, bool asJson) {
  LabeledProgram lp = load(file);
  concrete::RunResult r = concrete::run(lp, fuel, trace);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& s = r.trace[i];
    std::cout << nlohmann::ordered_json{{"step", i},
                                        {"label", s.stmt},
                                        {"fp", concrete::format_pointer(s.fp)},
                                        {"kontDepth", concrete::kont_depth(s.kont)}}
                     .dump()
              << "\n";
  }
  bool fuelOut = std::holds_alternative<concrete::FuelExhausted>(r.outcome.kind);
  if (asJson) {
    json j{{"outcome", r.outcome.describe(lp)}, {"steps", r.outcome.steps}};
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, concrete::Halted> || std::is_same_v<K, concrete::Uncaught>)
            j["class"] = lp.name(k.value.cls);
        },
        r.outcome.kind);
    std::cout << j.dump() << "\n";
  } else {
    std::cout << r.outcome.describe(lp) << " after " << r.outcome.steps << " steps\n";
  }
  return fuelOut ? 2 : 0;
}

struct AnalyzeOpts {
  int k = 0;
  bool objSens = false;
  std::string gc = "on", liveness = "on", mode = "pushdown", store = "per-state";
  std::string dot, jsonPath;
  std::size_t budgetNodes = abstract::Policy{}.budgetNodes;
  double budgetSeconds = abstract::Policy{}.budgetSeconds;
};

abstract::Policy policy_of(const AnalyzeOpts& o) {
  abstract::Policy p;
  p.k = o.k;
  p.objSensitivity = o.objSens;
  p.gc = o.gc == "on";
  p.liveness = o.liveness == "on";
  p.mode = o.mode == "finite" ? abstract::Mode::Finite : abstract::Mode::Pushdown;
  p.storeMode = o.store == "per-node" ? abstract::StoreMode::PerNode : abstract::StoreMode::PerState;
  p.budgetNodes = o.budgetNodes;
  p.budgetSeconds = o.budgetSeconds;
  return p;
}

int cmd_analyze(const std::string& file, const AnalyzeOpts& o) {
  LabeledProgram lp = load(file);
  abstract::DSG g = abstract::analyze(lp, policy_of(o));
  metrics::Report r = metrics::report(lp, g);
  if (!o.dot.empty()) write_file(o.dot, abstract::to_dot(lp, g));
  if (!o.jsonPath.empty()) {
    json j = json::parse(abstract::to_json(lp, g));
    j["report"] = report_json(lp, r);
    write_file(o.jsonPath, j.dump(1) + "\n");
    if (o.jsonPath == "-") return 0;
  }
  print_report(lp, r);
  return 0;
}

int cmd_compare(const std::string& file, const std::string& a, const std::string& b,
                const AnalyzeOpts& o, bool asJson) {
  LabeledProgram lp = load(file);
  abstract::Policy base = policy_of(o);
  abstract::Policy pa, pb;
  try {
    pa = abstract::parse_policy(a, base);
    pb = abstract::parse_policy(b, base);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  metrics::Report ra = metrics::report(lp, abstract::analyze(lp, pa));
  metrics::Report rb = metrics::report(lp, abstract::analyze(lp, pb));
  metrics::Ratios q = metrics::ratios(ra, rb);
  if (asJson) {
    json j{{"a", report_json(lp, ra)},
           {"b", report_json(lp, rb)},
           {"ratios",
            {{"varPointsTo", opt(q.varPointsTo)}, {"throws", opt(q.throws)},
             {"avgLinks", opt(q.avgLinks)}, {"nodes", opt(q.nodes)}, {"edges", opt(q.edges)}}}};
    std::cout << j.dump(1) << "\n";
    return 0;
  }
  std::cout << "== a\n";
  print_report(lp, ra);
  std::cout << "== b\n";
  print_report(lp, rb);
  std::cout << "== ratios (cardinality b/a, size a/b)\n"
            << "VarPointsTo  " << show(q.varPointsTo) << "\n"
            << "Throws       " << show(q.throws) << "\n"
            << "E-C links    " << show(q.avgLinks) << "\n"
            << "nodes        " << show(q.nodes) << "\n"
            << "edges        " << show(q.edges) << "\n";
  return 0;
}

void add_policy_options(CLI::App* c, AnalyzeOpts& o) {
  c->add_option("--k", o.k, "time-stamp length")->check(CLI::NonNegativeNumber);
  c->add_flag("--obj-sens", o.objSens, "object-sensitive frame pointers");
  c->add_option("--gc", o.gc, "abstract garbage collection")->check(CLI::IsMember({"on", "off"}));
  c->add_option("--liveness", o.liveness, "liveness-restricted GC roots")
      ->check(CLI::IsMember({"on", "off"}));
  c->add_option("--mode", o.mode, "stack model")->check(CLI::IsMember({"pushdown", "finite"}));
  c->add_option("--store", o.store, "store placement")
      ->check(CLI::IsMember({"per-state", "per-node"}));
  c->add_option("--budget-nodes", o.budgetNodes, "node budget");
  c->add_option("--budget-seconds", o.budgetSeconds, "time budget in seconds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ANF-J reference interpreter and pushdown exception-flow analyzer", "anfj"};
  app.require_subcommand(1);

  std::string file;
  std::size_t fuel = concrete::kDefaultFuel;
  bool trace = false, asJson = false;
  auto* run = app.add_subcommand("run", "run a program on the concrete machine");
  run->add_option("FILE", file)->required();
  run->add_option("--fuel", fuel, "step limit");
  run->add_flag("--trace", trace, "print one JSON line per state");
  run->add_flag("--json", asJson, "print the outcome as JSON");

  AnalyzeOpts ao;
  auto* analyze = app.add_subcommand("analyze", "build the dynamic state graph and report metrics");
  analyze->add_option("FILE", file)->required();
  add_policy_options(analyze, ao);
  analyze->add_option("--dot", ao.dot, "write Graphviz DOT to PATH ('-' for stdout)");
  analyze->add_option("--json", ao.jsonPath, "write the graph and report as JSON to PATH ('-' for stdout)");

  std::string pa, pb;
  auto* compare = app.add_subcommand("compare", "analyze under two policies and report ratios");
  compare->add_option("FILE", file)->required();
  compare->add_option("--a", pa, "policy, e.g. k=1,obj,gc=off,finite")->required();
  compare->add_option("--b", pb, "policy")->required();
  compare->add_flag("--json", asJson, "print JSON");
  compare->add_option("--budget-nodes", ao.budgetNodes, "node budget");
  compare->add_option("--budget-seconds", ao.budgetSeconds, "time budget in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(file, fuel, trace, asJson);
    if (*analyze) return cmd_analyze(file, ao);
    return cmd_compare(file, pa, pb, ao, asJson);
  } catch (const BudgetExceeded& e) {
    std::cerr << "anfj: budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const SyntaxError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "anfj: " << e.what() << "\n";
    return 1;
  }
}
