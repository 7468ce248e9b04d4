#include <algorithm>
#include <deque>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "fmo/equivalence.hpp"
#include "fmo/eval.hpp"
#include "fmo/fog.hpp"
#include "fmo/grammar.hpp"
#include "fmo/kinding.hpp"
#include "fmo/lts.hpp"
#include "fmo/parse.hpp"
#include "fmo/reduce.hpp"
#include "fmo/rename.hpp"
#include "fmo/term.hpp"
#include "fmo/typecheck.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace fmo;

namespace {

constexpr int kSchemaVersion = 1;

enum Exit { kOk = 0, kNo = 1, kUnknown = 2, kError = 3 };

struct Config {
  std::string backend = "auto";
  std::size_t oracle_depth = 64;
  std::size_t node_cap = 100000;
  std::size_t fsa_cap = 4096;
  std::uint64_t seed = 1;
  std::size_t fuel = 10000;
  std::string format = "text";
  std::string ctx;
  bool explain = false;

  bool as_json() const { return format == "json"; }

  EquivConfig equiv() const {
    EquivConfig c;
    c.backend = *parse_backend(backend);
    c.oracle_depth = oracle_depth;
    c.node_cap = node_cap;
    c.fsa_cap = fsa_cap;
    return c;
  }
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inline text, or the contents of a file when written `@path`.
std::string source(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return read_file(arg.substr(1));
  return arg;
}

json header(const char* command) { return json{{"schema_version", kSchemaVersion}, {"command", command}}; }

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

int exit_for(Verdict::Result r) {
  switch (r) {
    case Verdict::Result::Bisimilar: return kOk;
    case Verdict::Result::NotBisimilar: return kNo;
    case Verdict::Result::Unknown: return kUnknown;
  }
  return kError;
}

json verdict_json(const Verdict& v, bool explain) {
  json j = {{"verdict", result_name(v.result)}};
  if (v.not_bisimilar()) j["trace"] = trace_string(v.trace);
  if (v.unknown()) j["reason"] = v.reason;
  if (explain) {
    j["method"] = v.method;
    j["explored"] = v.explored;
  }
  return j;
}

std::string verdict_text(const Verdict& v, bool explain) {
  std::string s = result_name(v.result);
  if (v.not_bisimilar()) s += "\ntrace: " + trace_string(v.trace);
  if (v.unknown()) s += "\nreason: " + v.reason;
  if (explain) s += "\nmethod: " + v.method + "\nexplored: " + std::to_string(v.explored);
  return s;
}

int cmd_kind(const Config& cfg, const std::string& arg) {
  KContext ctx = parse_kcontext(cfg.ctx);
  Type t = parse_type(source(arg));
  Kind k = kind_of(ctx, t);
  if (cfg.as_json()) {
    json doc = header("kind");
    doc["type"] = to_string(t);
    doc["kind"] = k.str();
    doc["fragment"] = fragment_name(classify(t));
    emit(doc);
  } else {
    std::cout << k.str() << "\n";
    if (cfg.explain) std::cout << "fragment: " << fragment_name(classify(t)) << "\n";
  }
  return kOk;
}

int cmd_norm(const Config& cfg, const std::string& arg) {
  KContext ctx = parse_kcontext(cfg.ctx);
  Type t = parse_type(source(arg));
  NormalizeResult r = normalize(ctx, t);
  if (r.divergent()) {
    std::cerr << "error: type does not normalise; repeating subterm " << to_string(r.witness) << "\n";
    return kError;
  }
  if (cfg.as_json()) {
    json doc = header("norm");
    doc["type"] = to_string(t);
    doc["whnf"] = to_string(r.type);
    doc["steps"] = r.steps;
    emit(doc);
  } else {
    std::cout << to_string(r.type) << "\n";
    if (cfg.explain) std::cout << "steps: " << r.steps << "\n";
  }
  return kOk;
}

struct PairResult {
  std::optional<Verdict> verdict;
  std::string error;
};

PairResult decide(const Config& cfg, const KContext& ctx, const std::string& t, const std::string& u) {
  try {
    return {equivalent(ctx, parse_type(t), parse_type(u), cfg.equiv()), {}};
  } catch (const std::exception& e) {
    return {std::nullopt, e.what()};
  }
}

int cmd_eq_batch(const Config& cfg, const std::string& path, std::size_t jobs) {
  KContext ctx = parse_kcontext(cfg.ctx);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw UsageError("batch line " + std::to_string(pairs.size() + 1) + " has no tab");
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  std::vector<PairResult> results(pairs.size());
  std::deque<std::future<void>> running;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (running.size() >= jobs) {
      running.front().get();
      running.pop_front();
    }
    running.push_back(std::async(std::launch::async, [&, i] {
      results[i] = decide(cfg, ctx, pairs[i].first, pairs[i].second);
    }));
  }
  for (auto& f : running) f.get();

  int code = kOk;
  json items = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const PairResult& r = results[i];
    int here = r.verdict ? exit_for(r.verdict->result) : kError;
    code = std::max(code, here);
    if (cfg.as_json()) {
      json j = r.verdict ? verdict_json(*r.verdict, cfg.explain) : json{{"error", r.error}};
      items.push_back(j);
    } else if (r.verdict) {
      std::string text = verdict_text(*r.verdict, cfg.explain);
      std::replace(text.begin(), text.end(), '\n', '\t');
      std::cout << i + 1 << ": " << text << "\n";
    } else {
      std::cout << i + 1 << ": error: " << r.error << "\n";
    }
  }
  if (cfg.as_json()) {
    json doc = header("eq");
    doc["results"] = items;
    emit(doc);
  }
  return code;
}

int cmd_eq(const Config& cfg, const std::string& t, const std::string& u) {
  KContext ctx = parse_kcontext(cfg.ctx);
  Verdict v = equivalent(ctx, parse_type(source(t)), parse_type(source(u)), cfg.equiv());
  if (cfg.as_json()) {
    json doc = header("eq");
    doc.update(verdict_json(v, cfg.explain));
    emit(doc);
  } else {
    std::cout << verdict_text(v, cfg.explain) << "\n";
  }
  return exit_for(v.result);
}

int cmd_grammar(const Config& cfg, const std::vector<std::string>& args) {
  GrammarBuilder b(parse_kcontext(cfg.ctx));
  for (const auto& a : args) b.word(rename(parse_type(source(a))));
  b.finish();
  const SimpleGrammar& g = b.grammar();
  if (cfg.as_json()) {
    std::cout << grammar_to_json(g) << "\n";
  } else {
    std::cout << dump_grammar(g);
    if (cfg.explain) std::cout << "productions: " << g.production_count() << "\n";
  }
  return kOk;
}

int cmd_lts(const Config& cfg, const std::string& arg, std::size_t depth) {
  KContext ctx = parse_kcontext(cfg.ctx);
  Type start = rename(parse_type(source(arg)));
  std::vector<Type> states{start};
  std::unordered_map<Type, std::size_t, TypeHash> index{{start, 0}};
  std::vector<std::tuple<std::size_t, std::string, std::size_t>> edges;
  std::vector<std::size_t> frontier{0};
  for (std::size_t d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<std::size_t> next;
    for (std::size_t s : frontier) {
      for (const auto& [label, succ] : transitions(ctx, states[s])) {
        auto [it, fresh] = index.emplace(succ, states.size());
        if (fresh) {
          states.push_back(succ);
          next.push_back(it->second);
        }
        edges.emplace_back(s, label.str(), it->second);
      }
    }
    frontier = std::move(next);
  }
  if (cfg.as_json()) {
    json doc = header("lts");
    doc["depth"] = depth;
    json ss = json::array();
    for (const Type& t : states) ss.push_back(to_string(t));
    json es = json::array();
    for (const auto& [from, label, to] : edges) es.push_back({{"from", from}, {"label", label}, {"to", to}});
    doc["states"] = ss;
    doc["edges"] = es;
    emit(doc);
  } else {
    for (std::size_t i = 0; i < states.size(); ++i) std::cout << "s" << i << " = " << to_string(states[i]) << "\n";
    for (const auto& [from, label, to] : edges) std::cout << "s" << from << " -" << label << "-> s" << to << "\n";
  }
  return kOk;
}

int cmd_fog(const Config& cfg, const std::string& path, std::size_t depth) {
  Fog g = parse_fog(read_file(path));
  FogEncoding enc(g);
  Type start = enc.start();
  std::optional<bool> agree;
  if (depth > 0) agree = fog_traces(g, g.start, depth) == encoded_traces(start, depth);
  if (cfg.as_json()) {
    json doc = header("fog");
    json nts = json::object();
    for (const auto& [x, t] : enc.nonterminals()) nts[x] = to_string(t);
    doc["nonterminals"] = nts;
    doc["start"] = to_string(start);
    if (agree) doc["traces_agree"] = *agree;
    emit(doc);
  } else {
    for (const auto& [x, t] : enc.nonterminals()) std::cout << x << " = " << to_string(t) << "\n";
    std::cout << "start = " << to_string(start) << "\n";
    if (agree) std::cout << "traces to depth " << depth << (*agree ? " agree" : " differ") << "\n";
  }
  return agree.value_or(true) ? kOk : kNo;
}

json type_error_json(const TypeError& e) {
  return {{"kind", error_name(e.kind())}, {"binding", e.binding()}, {"detail", e.detail()}};
}

int cmd_check(const Config& cfg, const std::string& path) {
  Program prog = parse_program(read_file(path));
  json doc = header("check");
  try {
    auto types = typecheck_program(prog, cfg.equiv());
    if (cfg.as_json()) {
      json bs = json::array();
      for (const Binding& b : prog.bindings) bs.push_back({{"name", b.name}, {"type", to_string(types.at(b.name))}});
      doc["ok"] = true;
      doc["bindings"] = bs;
      emit(doc);
    } else {
      for (const Binding& b : prog.bindings) std::cout << b.name << " : " << to_string(types.at(b.name)) << "\n";
    }
    return kOk;
  } catch (const TypeError& e) {
    if (cfg.as_json()) {
      doc["ok"] = false;
      doc["error"] = type_error_json(e);
      emit(doc);
    } else {
      std::cout << "error: " << e.what() << "\n";
    }
    return kNo;
  }
}

int cmd_run(const Config& cfg, const std::string& path, const std::string& entry, bool unsafe, bool trace) {
  Program prog = parse_program(read_file(path));
  json doc = header("run");
  if (!unsafe) {
    try {
      typecheck_program(prog, cfg.equiv());
    } catch (const TypeError& e) {
      if (cfg.as_json()) {
        doc["error"] = type_error_json(e);
        emit(doc);
      } else {
        std::cout << "error: " << e.what() << "\n";
      }
      return kNo;
    }
  }
  RunOptions opt;
  opt.seed = cfg.seed;
  opt.fuel = cfg.fuel;
  opt.entry = entry;
  opt.keep_trace = trace;
  Outcome o = run(prog, opt);
  if (cfg.as_json()) {
    doc["outcome"] = outcome_name(o.kind);
    doc["steps"] = o.steps;
    if (o.kind == Outcome::Kind::Value) doc["value"] = to_string(o.value);
    if (o.error) doc["runtime_error"] = {{"kind", runtime_error_name(o.error->kind)}, {"location", o.error->location}};
    if (o.kind == Outcome::Kind::Stuck) doc["process"] = o.process.str();
    if (trace) {
      json ts = json::array();
      for (const StepEvent& ev : o.trace) ts.push_back(ev.str());
      doc["trace"] = ts;
    }
    emit(doc);
  } else {
    if (trace) {
      for (const StepEvent& ev : o.trace) std::cout << ev.str() << "\n";
    }
    std::cout << outcome_name(o.kind) << "\n";
    if (o.kind == Outcome::Kind::Value) std::cout << "value: " << to_string(o.value) << "\n";
    if (o.error) std::cout << "runtime error: " << runtime_error_name(o.error->kind) << " at " << o.error->location << "\n";
    if (o.kind == Outcome::Kind::Stuck) std::cout << "process: " << o.process.str() << "\n";
    std::cout << "steps: " << o.steps << "\n";
  }
  return o.kind == Outcome::Kind::Value ? kOk : kNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Type equivalence, grammars and a session-typed language"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub, bool equivalence) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--ctx", cfg.ctx, "Kinding context, e.g. \"a:T, f:S=>S\"");
    sub->add_flag("--explain", cfg.explain, "Show method, certificate size or trace details");
    if (!equivalence) return;
    sub->add_option("--backend", cfg.backend, "Equivalence backend")
        ->check(CLI::IsMember({"auto", "grammar", "fsa", "oracle"}));
    sub->add_option("--oracle-depth", cfg.oracle_depth, "Bounded bisimulation depth")->check(CLI::PositiveNumber);
    sub->add_option("--node-cap", cfg.node_cap, "Expansion tree node cap")->check(CLI::PositiveNumber);
    sub->add_option("--fsa-cap", cfg.fsa_cap, "Automaton state cap")->check(CLI::PositiveNumber);
  };

  std::string type_a, type_b, file, batch, entry = "main";
  std::vector<std::string> types;
  std::size_t depth = 4, fog_depth = 0, jobs = std::max(1u, std::thread::hardware_concurrency());
  bool unsafe = false, trace = false;

  auto* kind = app.add_subcommand("kind", "Infer the kind of a type");
  kind->add_option("type", type_a, "Type or @file")->required();
  common(kind, false);

  auto* norm = app.add_subcommand("norm", "Reduce a type to weak head normal form");
  norm->add_option("type", type_a, "Type or @file")->required();
  common(norm, false);

  auto* eq = app.add_subcommand("eq", "Decide type equivalence");
  eq->add_option("left", type_a, "Type or @file");
  eq->add_option("right", type_b, "Type or @file");
  eq->add_option("--batch", batch, "File of TAB-separated pairs");
  eq->add_option("--jobs", jobs, "Parallel queries in batch mode")->check(CLI::PositiveNumber);
  common(eq, true);

  auto* grammar = app.add_subcommand("grammar", "Print the simple grammar of one or more types");
  grammar->add_option("types", types, "Types or @files")->required();
  common(grammar, false);

  auto* lts = app.add_subcommand("lts", "Print the reachable labelled transition graph");
  lts->add_option("type", type_a, "Type or @file")->required();
  lts->add_option("--depth", depth, "Exploration depth");
  common(lts, false);

  auto* fog = app.add_subcommand("fog", "Encode a first-order grammar as types");
  fog->add_option("file", file, "Grammar file")->required();
  fog->add_option("--depth", fog_depth, "Compare trace sets up to this depth");
  common(fog, false);

  auto* check = app.add_subcommand("check", "Typecheck a program");
  check->add_option("file", file, "Program file")->required();
  common(check, true);

  auto* runc = app.add_subcommand("run", "Typecheck and run a program");
  runc->add_option("file", file, "Program file")->required();
  runc->add_option("--entry", entry, "Binding to run");
  runc->add_option("--seed", cfg.seed, "Scheduler seed");
  runc->add_option("--fuel", cfg.fuel, "Step bound")->check(CLI::PositiveNumber);
  runc->add_flag("--unsafe", unsafe, "Skip typechecking");
  runc->add_flag("--trace", trace, "Print every reduction step");
  common(runc, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (kind->parsed()) return cmd_kind(cfg, type_a);
    if (norm->parsed()) return cmd_norm(cfg, type_a);
    if (eq->parsed()) {
      if (!batch.empty()) return cmd_eq_batch(cfg, batch, jobs);
      if (type_a.empty() || type_b.empty()) throw UsageError("eq needs two types or --batch");
      return cmd_eq(cfg, type_a, type_b);
    }
    if (grammar->parsed()) return cmd_grammar(cfg, types);
    if (lts->parsed()) return cmd_lts(cfg, type_a, depth);
    if (fog->parsed()) return cmd_fog(cfg, file, fog_depth);
    if (check->parsed()) return cmd_check(cfg, file);
    if (runc->parsed()) return cmd_run(cfg, file, entry, unsafe, trace);
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
  } catch (const KindError& e) {
    std::cerr << "kind error (" << reason_name(e.reason()) << "): " << e.what() << "\n";
  } catch (const FogError& e) {
    std::cerr << "grammar error at line " << e.line() << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kError;
}
