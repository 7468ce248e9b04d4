#include "fmo/eval.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "fmo/rename.hpp"

namespace fmo {

Definitions program_definitions(const Program& prog) {
  Definitions defs;
  for (const Binding& b : prog.bindings) {
    if (b.body) defs[b.name] = *b.body;
  }
  return defs;
}

// ---------------------------------------------------------- substitution

Term substitute(const Term& t, const std::string& x, const Term& v) {
  switch (t.tag()) {
    case TermTag::Var:
      return t.name() == x ? v : t;
    case TermTag::Const:
    case TermTag::Endpoint:
      return t;
    case TermTag::Abs:
    case TermTag::Rec:
      if (t.name() == x) return t;
      break;
    case TermTag::LetRecord: {
      Term scrutinee = substitute(t.kid(0), x, v);
      const auto& bs = t.binders();
      if (std::find(bs.begin(), bs.end(), x) != bs.end()) return t.with_kid(0, scrutinee);
      return t.with_kids({scrutinee, substitute(t.kid(1), x, v)});
    }
    case TermTag::Let: {
      Term bound = substitute(t.kid(0), x, v);
      if (t.name() == x) return t.with_kid(0, bound);
      return t.with_kids({bound, substitute(t.kid(1), x, v)});
    }
    default:
      break;
  }
  std::vector<Term> kids;
  for (std::size_t i = 0; i < t.kid_count(); ++i) kids.push_back(substitute(t.kid(i), x, v));
  return t.with_kids(std::move(kids));
}

Term substitute_type(const Term& t, const VarName& a, const Type& u) {
  if (t.is(TermTag::TAbs) && VarName::user(t.name()) == a) return t;
  Term out = t;
  const Type& ann = t.type();
  if (!ann.is_null() && ann.is_free(a)) out = out.with_type(rename_subst(ann, {{a, u}}));
  if (t.kid_count() == 0) return out;
  std::vector<Term> kids;
  for (std::size_t i = 0; i < t.kid_count(); ++i) kids.push_back(substitute_type(t.kid(i), a, u));
  return out.with_kids(std::move(kids));
}

// ----------------------------------------------------------------- redexes

namespace {

struct Focus {
  std::vector<std::size_t> path;
  Term redex;
};

bool is_global(const Term& t, const Definitions& defs) {
  return t.is(TermTag::Var) && defs.count(t.name());
}

// Leftmost-innermost position of the next call-by-value step.
std::optional<Focus> focus(const Term& t, const Definitions& defs) {
  auto descend = [&](std::size_t i) -> std::optional<Focus> {
    auto f = focus(t.kid(i), defs);
    if (f) f->path.insert(f->path.begin(), i);
    return f;
  };
  auto at = [&](std::size_t i) -> std::optional<Focus> { return Focus{{i}, t.kid(i)}; };
  switch (t.tag()) {
    case TermTag::Var:
      if (defs.count(t.name())) return Focus{{}, t};
      return std::nullopt;
    case TermTag::App:
      if (is_global(t.kid(0), defs)) return at(0);
      if (!is_value(t.kid(0))) return descend(0);
      if (!is_value(t.kid(1))) return descend(1);
      if (is_value(t)) return std::nullopt;
      return Focus{{}, t};
    case TermTag::TApp:
      if (is_global(t.kid(0), defs)) return at(0);
      if (!is_value(t.kid(0))) return descend(0);
      if (is_value(t)) return std::nullopt;
      return Focus{{}, t};
    case TermTag::Record:
    case TermTag::Variant:
      for (std::size_t i = 0; i < t.kid_count(); ++i) {
        if (!is_value(t.kid(i))) return descend(i);
      }
      return std::nullopt;
    case TermTag::LetRecord:
    case TermTag::Let:
    case TermTag::Case:
    case TermTag::Match:
      if (t.tag() != TermTag::Let && is_global(t.kid(0), defs)) return at(0);
      if (!is_value(t.kid(0))) return descend(0);
      return Focus{{}, t};
    default:
      return std::nullopt;
  }
}

Term plug(const Term& t, const std::vector<std::size_t>& path, std::size_t depth, const Term& r) {
  if (depth == path.size()) return r;
  std::size_t i = path[depth];
  return t.with_kid(i, plug(t.kid(i), path, depth + 1, r));
}

enum class Op { Receive, Send, Select, Close, Match };

struct Redex {
  enum class Kind { Local, Fork, New, Session, Error, Stuck };
  Kind kind = Kind::Stuck;
  std::string rule;
  Term result;    // Local
  Term payload;   // Fork thunk; Send value
  Type type;      // New
  Op op = Op::Close;
  std::string subject;
  std::string label;                   // Select
  std::vector<std::string> labels;     // Match
  Term handlers;                       // Match: the redex itself
  RuntimeErrorKind error = RuntimeErrorKind::BadApplication;
};

Redex local(std::string rule, Term result) {
  Redex r;
  r.kind = Redex::Kind::Local;
  r.rule = std::move(rule);
  r.result = std::move(result);
  return r;
}

Redex failure(RuntimeErrorKind k) {
  Redex r;
  r.kind = Redex::Kind::Error;
  r.error = k;
  return r;
}

Redex session(Op op, const Term& subject) {
  // A free variable subject blocks the term without being an error.
  if (subject.is(TermTag::Var)) return Redex{};
  if (!subject.is(TermTag::Endpoint)) return failure(RuntimeErrorKind::NotAChannel);
  Redex r;
  r.kind = Redex::Kind::Session;
  r.op = op;
  r.subject = subject.name();
  return r;
}

bool is_tapp_of(const Term& t, ConstName c) { return t.is(TermTag::TApp) && t.kid(0).is_const(c); }

Redex classify(const Term& t, const Definitions& defs) {
  switch (t.tag()) {
    case TermTag::Var: {
      auto it = defs.find(t.name());
      if (it != defs.end()) return local("delta", it->second);
      return Redex{};
    }
    case TermTag::App: {
      const Term& f = t.kid(0);
      const Term& a = t.kid(1);
      if (f.is(TermTag::Abs)) return local("beta", substitute(f.kid(0), f.name(), a));
      if (f.is(TermTag::Rec)) return local("rec", Term::app(substitute(f.kid(0), f.name(), f), a));
      if (f.is(TermTag::TApp) && is_tapp_of(f.kid(0), ConstName::Receive)) return session(Op::Receive, a);
      if (f.is(TermTag::TApp) && f.kid(0).is(TermTag::App) && is_tapp_of(f.kid(0).kid(0), ConstName::Send)) {
        Redex r = session(Op::Send, a);
        r.payload = f.kid(0).kid(1);
        return r;
      }
      if (f.is_const(ConstName::Select)) {
        Redex r = session(Op::Select, a);
        r.label = f.name();
        return r;
      }
      if (f.is_const(ConstName::Close)) return session(Op::Close, a);
      if (f.is_const(ConstName::Fork)) {
        Redex r;
        r.kind = Redex::Kind::Fork;
        r.rule = "fork";
        r.payload = a;
        return r;
      }
      return failure(RuntimeErrorKind::BadApplication);
    }
    case TermTag::TApp: {
      const Term& f = t.kid(0);
      if (f.is(TermTag::TAbs)) return local("tbeta", substitute_type(f.kid(0), VarName::user(f.name()), t.type()));
      if (f.is(TermTag::Rec)) return local("rec", Term::tapp(substitute(f.kid(0), f.name(), f), t.type()));
      if (f.is_const(ConstName::New)) {
        Redex r;
        r.kind = Redex::Kind::New;
        r.rule = "new";
        r.type = t.type();
        return r;
      }
      return failure(RuntimeErrorKind::BadTypeApplication);
    }
    case TermTag::LetRecord: {
      const Term& v = t.kid(0);
      if (!v.is(TermTag::Record)) return failure(RuntimeErrorKind::BadRecordPattern);
      std::vector<std::string> want(t.labels()), have(v.labels());
      std::sort(want.begin(), want.end());
      std::sort(have.begin(), have.end());
      if (want != have) return failure(RuntimeErrorKind::BadRecordPattern);
      Term body = t.kid(1);
      // Later binders shadow earlier ones; substitute right to left.
      for (std::size_t i = t.labels().size(); i-- > 0;) {
        auto it = std::find(v.labels().begin(), v.labels().end(), t.labels()[i]);
        std::size_t j = static_cast<std::size_t>(it - v.labels().begin());
        bool shadowed = false;
        for (std::size_t k = i + 1; k < t.binders().size(); ++k) shadowed |= t.binders()[k] == t.binders()[i];
        if (!shadowed) body = substitute(body, t.binders()[i], v.kid(j));
      }
      return local("record", body);
    }
    case TermTag::Let:
      return local("let", substitute(t.kid(1), t.name(), t.kid(0)));
    case TermTag::Case: {
      const Term& v = t.kid(0);
      if (!v.is(TermTag::Variant)) return failure(RuntimeErrorKind::BadCase);
      const auto& ls = t.labels();
      auto it = std::find(ls.begin(), ls.end(), v.name());
      if (it == ls.end()) return failure(RuntimeErrorKind::BadCase);
      std::size_t j = static_cast<std::size_t>(it - ls.begin());
      return local("case", Term::app(t.kid(j + 1), v.kid(0)));
    }
    case TermTag::Match: {
      Redex r = session(Op::Match, t.kid(0));
      r.labels = t.labels();
      r.handlers = t;
      return r;
    }
    default:
      return Redex{};
  }
}

bool agree(const Redex& a, const Redex& b) {
  auto pair_is = [&](Op x, Op y) { return (a.op == x && b.op == y) || (a.op == y && b.op == x); };
  if (pair_is(Op::Receive, Op::Send)) return true;
  if (a.op == Op::Close && b.op == Op::Close) return true;
  if (pair_is(Op::Match, Op::Select)) {
    const Redex& m = a.op == Op::Match ? a : b;
    const Redex& s = a.op == Op::Match ? b : a;
    return std::find(m.labels.begin(), m.labels.end(), s.label) != m.labels.end();
  }
  return false;
}

struct Analysed {
  std::optional<Focus> focus;
  Redex redex;
};

std::vector<Analysed> analyse(const Process& p, const Definitions& defs) {
  std::vector<Analysed> out;
  for (const Thread& th : p.threads) {
    Analysed a;
    a.focus = focus(th.term, defs);
    if (a.focus) a.redex = classify(a.focus->redex, defs);
    out.push_back(std::move(a));
  }
  return out;
}

std::string partner(const Process& p, const std::string& x) {
  for (const auto& [a, b] : p.channels) {
    if (a == x) return b;
    if (b == x) return a;
  }
  return {};
}

std::string redex_text(const Process& p, const std::vector<Analysed>& an, std::size_t i) {
  return "thread " + std::to_string(p.threads[i].id) + ": " + to_string(an[i].focus->redex);
}

}  // namespace

const char* runtime_error_name(RuntimeErrorKind k) {
  switch (k) {
    case RuntimeErrorKind::BadApplication: return "BadApplication";
    case RuntimeErrorKind::BadTypeApplication: return "BadTypeApplication";
    case RuntimeErrorKind::BadRecordPattern: return "BadRecordPattern";
    case RuntimeErrorKind::BadCase: return "BadCase";
    case RuntimeErrorKind::NotAChannel: return "NotAChannel";
    case RuntimeErrorKind::SharedSubject: return "SharedSubject";
    case RuntimeErrorKind::Disagreement: return "Disagreement";
  }
  return "?";
}

const char* outcome_name(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Value: return "Value";
    case Outcome::Kind::Stuck: return "Stuck";
    case Outcome::Kind::FuelExhausted: return "FuelExhausted";
    case Outcome::Kind::RuntimeError: return "RuntimeError";
  }
  return "?";
}

std::string StepEvent::str() const {
  std::string s = rule;
  for (std::size_t t : threads) s += " t" + std::to_string(t);
  return s;
}

Process Process::main(Term t) {
  Process p;
  p.threads.push_back({0, std::move(t)});
  return p;
}

std::string Process::str() const {
  std::string s;
  for (const auto& [x, y] : channels) s += "(nu " + x + " " + y + ") ";
  for (std::size_t i = 0; i < threads.size(); ++i) {
    if (i) s += " | ";
    s += "<" + std::to_string(threads[i].id) + "> " + to_string(threads[i].term);
  }
  return s;
}

std::optional<Term> term_step(const Term& t, const Definitions& defs) {
  auto f = focus(t, defs);
  if (!f) return std::nullopt;
  Redex r = classify(f->redex, defs);
  if (r.kind != Redex::Kind::Local) return std::nullopt;
  return plug(t, f->path, 0, r.result);
}

TermStatus term_status(const Term& t, const Definitions& defs) {
  auto f = focus(t, defs);
  if (!f) return TermStatus::Value;
  switch (classify(f->redex, defs).kind) {
    case Redex::Kind::Local: return TermStatus::Reduces;
    case Redex::Kind::Error: return TermStatus::Error;
    default: return TermStatus::Blocked;
  }
}

std::optional<RuntimeErrorInfo> detect_error(const Process& p, const Definitions& defs) {
  std::vector<Analysed> an = analyse(p, defs);
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < an.size(); ++i) {
    if (!an[i].focus) continue;
    const Redex& r = an[i].redex;
    if (r.kind == Redex::Kind::Error) return RuntimeErrorInfo{r.error, redex_text(p, an, i)};
    if (r.kind == Redex::Kind::Session) by_subject[r.subject].push_back(i);
  }
  for (const auto& [x, ts] : by_subject) {
    if (ts.size() > 1) {
      return RuntimeErrorInfo{RuntimeErrorKind::SharedSubject,
                              redex_text(p, an, ts[0]) + " and " + redex_text(p, an, ts[1])};
    }
  }
  for (const auto& [x, y] : p.channels) {
    auto a = by_subject.find(x);
    auto b = by_subject.find(y);
    if (a == by_subject.end() || b == by_subject.end()) continue;
    std::size_t i = a->second[0];
    std::size_t j = b->second[0];
    if (!agree(an[i].redex, an[j].redex)) {
      return RuntimeErrorInfo{RuntimeErrorKind::Disagreement,
                              redex_text(p, an, i) + " and " + redex_text(p, an, j)};
    }
  }
  return std::nullopt;
}

std::optional<Process> proc_step(const Process& p, Scheduler& sched, const Definitions& defs,
                                 StepEvent* event) {
  std::vector<Analysed> an = analyse(p, defs);
  struct Action {
    std::size_t i;
    std::size_t j;  // partner thread for communication
    bool comm;
  };
  std::vector<Action> actions;
  for (std::size_t i = 0; i < an.size(); ++i) {
    if (!an[i].focus) continue;
    Redex::Kind k = an[i].redex.kind;
    if (k == Redex::Kind::Local || k == Redex::Kind::Fork || k == Redex::Kind::New) {
      actions.push_back({i, i, false});
    }
  }
  for (std::size_t i = 0; i < an.size(); ++i) {
    if (!an[i].focus || an[i].redex.kind != Redex::Kind::Session) continue;
    std::string other = partner(p, an[i].redex.subject);
    if (other.empty()) continue;
    for (std::size_t j = i + 1; j < an.size(); ++j) {
      if (!an[j].focus || an[j].redex.kind != Redex::Kind::Session) continue;
      if (an[j].redex.subject == other && agree(an[i].redex, an[j].redex)) actions.push_back({i, j, true});
    }
  }
  if (actions.empty()) return std::nullopt;
  const Action act = actions[sched.pick(actions.size())];

  Process q = p;
  auto put = [&](std::size_t i, const Term& r) {
    q.threads[i].term = plug(p.threads[i].term, an[i].focus->path, 0, r);
  };
  StepEvent ev;
  ev.threads.push_back(p.threads[act.i].id);
  const Redex& ri = an[act.i].redex;
  if (!act.comm) {
    switch (ri.kind) {
      case Redex::Kind::Local:
        put(act.i, ri.result);
        break;
      case Redex::Kind::Fork:
        put(act.i, Term::unit());
        q.threads.push_back({q.next_thread++, Term::app(ri.payload, Term::unit())});
        break;
      case Redex::Kind::New: {
        std::string n = std::to_string(q.next_channel++);
        std::string x = "x" + n;
        std::string y = "y" + n;
        q.channels.emplace_back(x, y);
        put(act.i, Term::pair(Term::endpoint(x), Term::endpoint(y)));
        break;
      }
      default:
        break;
    }
    ev.rule = ri.rule;
  } else {
    ev.threads.push_back(p.threads[act.j].id);
    std::size_t a = act.i;
    std::size_t b = act.j;
    const Redex* ra = &an[a].redex;
    const Redex* rb = &an[b].redex;
    // Orient so that `a` is the receiving or branching side.
    if (ra->op == Op::Send || ra->op == Op::Select) {
      std::swap(a, b);
      std::swap(ra, rb);
    }
    Term ea = Term::endpoint(ra->subject);
    Term eb = Term::endpoint(rb->subject);
    switch (ra->op) {
      case Op::Receive:
        put(a, Term::pair(rb->payload, ea));
        put(b, eb);
        ev.rule = "message";
        break;
      case Op::Match: {
        const Term& m = ra->handlers;
        auto it = std::find(m.labels().begin(), m.labels().end(), rb->label);
        std::size_t k = static_cast<std::size_t>(it - m.labels().begin());
        put(a, Term::app(m.kid(k + 1), ea));
        put(b, eb);
        ev.rule = "choice";
        break;
      }
      case Op::Close: {
        put(a, Term::unit());
        put(b, Term::unit());
        auto c = std::find_if(q.channels.begin(), q.channels.end(), [&](const auto& ch) {
          return ch.first == ra->subject || ch.second == ra->subject;
        });
        if (c != q.channels.end()) q.channels.erase(c);
        ev.rule = "close";
        break;
      }
      default:
        break;
    }
  }
  // Finished threads other than the main one are garbage.
  std::vector<Thread> live;
  for (Thread& th : q.threads) {
    if (th.id != 0 && th.term.is(TermTag::Record) && th.term.kid_count() == 0) continue;
    live.push_back(std::move(th));
  }
  q.threads = std::move(live);
  if (event) *event = std::move(ev);
  return q;
}

Outcome run_process(Process p, const Definitions& defs, const RunOptions& options) {
  Scheduler sched(options.seed);
  Outcome out;
  for (;;) {
    if (auto err = detect_error(p, defs)) {
      out.kind = Outcome::Kind::RuntimeError;
      out.error = err;
      break;
    }
    bool done = std::all_of(p.threads.begin(), p.threads.end(),
                            [&](const Thread& th) { return !focus(th.term, defs); });
    if (done) {
      out.kind = Outcome::Kind::Value;
      for (const Thread& th : p.threads) {
        if (th.id == 0) out.value = th.term;
      }
      break;
    }
    if (out.steps >= options.fuel) {
      out.kind = Outcome::Kind::FuelExhausted;
      break;
    }
    StepEvent ev;
    auto next = proc_step(p, sched, defs, &ev);
    if (!next) {
      out.kind = Outcome::Kind::Stuck;
      break;
    }
    ++out.steps;
    if (options.keep_trace) out.trace.push_back(std::move(ev));
    p = std::move(*next);
  }
  out.process = std::move(p);
  return out;
}

Outcome run(const Program& prog, const RunOptions& options) {
  const Binding* entry = prog.find(options.entry);
  if (!entry || !entry->body) throw std::invalid_argument("no definition for entry point " + options.entry);
  return run_process(Process::main(Term::var(options.entry)), program_definitions(prog), options);
}

}  // namespace fmo
