// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/lineage.hpp"

#include <algorithm>
#include <set>

namespace nbtrace {

using syntax::Expr;
using syntax::ExprKind;
using syntax::OtherExprKind;
using syntax::OtherStmtKind;
using syntax::Stmt;
using syntax::StmtKind;

namespace {

using NameSet = std::set<std::string, std::less<>>;

void add_unique(std::vector<std::string>& v, const std::string& name) {
  if (std::find(v.begin(), v.end(), name) == v.end()) v.push_back(name);
}

// One target of an assignment paired with the value it receives. `unpacked`
// marks targets that take a piece of a value that is not a literal tuple.
struct Binding {
  const Expr* target;
  const Expr* value;
  bool unpacked;
};

bool is_sequence(const Expr& e) { return e.is(OtherExprKind::Tuple) || e.is(OtherExprKind::List); }

void flatten(const Expr& target, const Expr* value, bool unpacked, std::vector<Binding>& out) {
  if (is_sequence(target)) {
    bool pairwise = value != nullptr && is_sequence(*value) && value->items.size() == target.items.size() &&
                    std::none_of(target.items.begin(), target.items.end(),
                                 [](const syntax::ExprPtr& e) { return e->is(OtherExprKind::Starred); });
    for (std::size_t i = 0; i < target.items.size(); ++i) {
      flatten(*target.items[i], pairwise ? value->items[i].get() : value, unpacked || !pairwise, out);
    }
  } else if (target.is(OtherExprKind::Starred)) {
    flatten(*target.items[0], value, true, out);
  } else {
    out.push_back(Binding{&target, value, unpacked});
  }
}

std::vector<Binding> bindings_of(const Stmt& stmt) {
  std::vector<Binding> out;
  if (stmt.is(StmtKind::Assign)) {
    for (const auto& t : stmt.targets) flatten(*t, stmt.value.get(), false, out);
  } else if (stmt.is(OtherStmtKind::AnnAssign) && stmt.value) {
    flatten(*stmt.targets[0], stmt.value.get(), false, out);
  }
  return out;
}

std::optional<FrameOrigin> binding_origin(const Binding& b, const FrameState& state, const ImportTable& table) {
  if (b.value == nullptr) return std::nullopt;
  if (auto o = frame_origin(*b.value, state, table)) return o;
  // train, test = split(df, ...): every piece derives from the first frame argument.
  if (b.unpacked && b.value->is(ExprKind::Call)) {
    for (const auto& a : b.value->args()) {
      if (auto o = frame_origin(*a, state, table)) return o;
    }
  }
  return std::nullopt;
}

// Known frames referenced by name or by exact rendered subscript.
class FrameReads : public syntax::Visitor {
 public:
  FrameReads(const FrameState& state, std::vector<std::string>& out) : state_(state), out_(out) {}
  void visit_expr(const Expr& e) override {
    if (e.is(ExprKind::Name)) {
      if (state_.contains(e.text)) add_unique(out_, e.text);
    } else if (e.is(ExprKind::Subscript) && !state_.empty()) {
      std::string rendered = syntax::render_source(e);
      if (state_.contains(rendered)) add_unique(out_, rendered);
    }
  }

 private:
  const FrameState& state_;
  std::vector<std::string>& out_;
};

// Loads inside an assignment target. With `include_base` false the frame
// being assigned into is skipped: `df.loc[df.a > 0, 'b'] = 1` loads only the
// index expression.
void walk_target_loads(const Expr& target, syntax::Visitor& v, bool include_base) {
  if (is_sequence(target) || target.is(OtherExprKind::Starred)) {
    for (const auto& i : target.items) walk_target_loads(*i, v, include_base);
    return;
  }
  if (target.is(ExprKind::Name)) return;
  if (include_base) {
    syntax::walk(target, v);
    return;
  }
  if (target.is(ExprKind::Subscript)) {
    syntax::walk(target.index(), v);
    walk_target_loads(target.value(), v, false);
  } else if (target.is(ExprKind::Attribute)) {
    walk_target_loads(target.value(), v, false);
  } else {
    syntax::walk(target, v);
  }
}

// Every expression in value position of a simple statement.
void walk_loads(const Stmt& stmt, syntax::Visitor& v, bool include_target_base) {
  switch (stmt.kind) {
    case StmtKind::Assign:
      if (stmt.value) syntax::walk(*stmt.value, v);
      for (const auto& t : stmt.targets) walk_target_loads(*t, v, include_target_base);
      return;
    case StmtKind::AugAssign:
      syntax::walk(*stmt.targets[0], v);
      syntax::walk(*stmt.value, v);
      return;
    case StmtKind::Other:
      if (stmt.other == OtherStmtKind::AnnAssign) {
        if (stmt.value) syntax::walk(*stmt.value, v);
        walk_target_loads(*stmt.targets[0], v, include_target_base);
        return;
      }
      if (stmt.other == OtherStmtKind::Delete) {
        for (const auto& t : stmt.targets) walk_target_loads(*t, v, include_target_base);
        for (const auto& t : stmt.exprs) walk_target_loads(*t, v, include_target_base);
        return;
      }
      syntax::walk(stmt, v);
      return;
    default:
      syntax::walk(stmt, v);
      return;
  }
}

// Frames mutated through a method call carrying inplace=True.
class InplaceWrites : public syntax::Visitor {
 public:
  InplaceWrites(const FrameState& state, std::vector<std::string>& out) : state_(state), out_(out) {}
  void visit_expr(const Expr& e) override {
    if (!e.is(ExprKind::Call) || !e.func().is(ExprKind::Attribute)) return;
    for (const auto& k : e.keywords) {
      if (k.name == "inplace" && k.value->is(ExprKind::Constant) && k.value->text == "True") {
        if (auto root = root_frame(e.func().value(), state_)) add_unique(out_, *root);
      }
    }
  }

 private:
  const FrameState& state_;
  std::vector<std::string>& out_;
};

std::vector<const Expr*> value_exprs(const Stmt& stmt) {
  std::vector<const Expr*> out;
  if (stmt.value) out.push_back(stmt.value.get());
  for (const auto& e : stmt.exprs) out.push_back(e.get());
  return out;
}

std::vector<const Expr*> mutated_targets(const Stmt& stmt) {
  std::vector<const Expr*> out;
  if (stmt.is(StmtKind::AugAssign)) out.push_back(stmt.targets[0].get());
  if (stmt.is(OtherStmtKind::Delete)) {
    for (const auto& t : stmt.targets) out.push_back(t.get());
    for (const auto& t : stmt.exprs) out.push_back(t.get());
  }
  return out;
}

bool reads_any_frame(const Expr& e, const FrameState& state) {
  std::vector<std::string> reads;
  FrameReads v(state, reads);
  syntax::walk(e, v);
  return !reads.empty();
}

// Names bound inside a statement's expressions: lambda parameters,
// comprehension targets, walrus targets.
class LocalBindings : public syntax::Visitor {
 public:
  void visit_expr(const Expr& e) override {
    if (e.is(ExprKind::Lambda)) {
      for (const auto& p : e.params) {
        if (!p.name.empty()) names.insert(p.name);
      }
    }
    if (e.is(OtherExprKind::NamedExpr)) bind(*e.items[0]);
    for (const auto& g : e.generators) bind(*g.target);
  }
  void bind(const Expr& t) {
    if (t.is(ExprKind::Name)) names.insert(t.text);
    for (const auto& i : t.items) {
      if (i && (is_sequence(t) || t.is(OtherExprKind::Starred))) bind(*i);
    }
  }
  NameSet names;
};

class LoadedNames : public syntax::Visitor {
 public:
  void visit_expr(const Expr& e) override {
    if (e.is(ExprKind::Name)) names.insert(e.text);
  }
  NameSet names;
};

// Methods that mark an otherwise unknown, never-bound name as a dataframe.
constexpr std::string_view kFrameApi[] = {
    "apply",      "applymap",      "astype",     "columns",       "copy",         "corr",     "describe",
    "drop",       "drop_duplicates", "dropna",   "dtypes",        "duplicated",   "fillna",   "groupby",
    "head",       "iloc",          "info",       "isna",          "isnull",       "join",     "loc",
    "map",        "merge",         "notna",      "notnull",       "nunique",      "pivot_table", "query",
    "rename",     "replace",       "reset_index", "sample",       "select_dtypes", "set_index", "shape",
    "sort_values", "tail",         "to_csv",     "value_counts",
};

bool is_frame_api(std::string_view attr) {
  return std::find(std::begin(kFrameApi), std::end(kFrameApi), attr) != std::end(kFrameApi);
}

class ImplicitFrames : public syntax::Visitor {
 public:
  void visit_expr(const Expr& e) override {
    if (!e.is(ExprKind::Attribute) || !is_frame_api(e.text)) return;
    const Expr* base = &e.value();
    while (base->is(ExprKind::Subscript)) base = &base->value();
    if (base->is(ExprKind::Name)) add_unique(candidates, base->text);
  }
  std::vector<std::string> candidates;
};

}  // namespace

void seed_frames(const Stmt& stmt, const ImportTable& table, FrameState& state, int cell) {
  for (const Binding& b : bindings_of(stmt)) {
    const Expr& t = *b.target;
    auto origin = binding_origin(b, state, table);
    auto create_from = [&](const std::string& name) {
      FrameInfo info;
      info.creation_cell = cell;
      info.last_modified_cell = cell;
      if (origin->from_reader) {
        info.source_dataset = origin->source_dataset;
      } else if (origin->derived_from) {
        if (*origin->derived_from == name) {
          state.touch(name, cell);
          return;
        }
        if (const FrameInfo* parent = state.find(*origin->derived_from)) info.source_dataset = parent->source_dataset;
        info.derived_from = origin->derived_from;
      }
      state.create(name, std::move(info));
    };

    if (t.is(ExprKind::Name)) {
      if (origin) {
        create_from(t.text);
      } else if (state.contains(t.text)) {
        // `df = clean(df)` keeps df; `df = 5` forgets it.
        if (b.value != nullptr && reads_any_frame(*b.value, state)) {
          state.touch(t.text, cell);
        } else {
          state.erase(t.text);
        }
      }
    } else if (t.is(ExprKind::Subscript) || t.is(ExprKind::Attribute)) {
      std::string rendered = syntax::render_source(t);
      if (state.contains(rendered)) {
        state.touch(rendered, cell);
      } else if (auto root = root_frame(t, state)) {
        state.touch(*root, cell);
      } else if (origin && t.is(ExprKind::Subscript)) {
        create_from(rendered);
      }
    }
  }
  for (const Expr* t : mutated_targets(stmt)) {
    if (auto root = root_frame(*t, state)) state.touch(*root, cell);
  }
  std::vector<std::string> inplace;
  InplaceWrites v(state, inplace);
  for (const Expr* e : value_exprs(stmt)) syntax::walk(*e, v);
  for (const auto& name : inplace) state.touch(name, cell);
}

FrameRefs detect_frame_refs(const Stmt& stmt, const FrameState& state, const ImportTable* table) {
  FrameRefs refs;
  FrameReads reads(state, refs.reads);
  walk_loads(stmt, reads, false);

  for (const Binding& b : bindings_of(stmt)) {
    const Expr& t = *b.target;
    bool produces = table != nullptr && binding_origin(b, state, *table).has_value();
    if (t.is(ExprKind::Name)) {
      if (state.contains(t.text) || produces) add_unique(refs.writes, t.text);
    } else if (t.is(ExprKind::Subscript) || t.is(ExprKind::Attribute)) {
      std::string rendered = syntax::render_source(t);
      if (state.contains(rendered)) {
        add_unique(refs.writes, rendered);
      } else if (auto root = root_frame(t, state)) {
        add_unique(refs.writes, *root);
      } else if (produces && t.is(ExprKind::Subscript)) {
        add_unique(refs.writes, rendered);
      }
    }
  }
  for (const Expr* t : mutated_targets(stmt)) {
    if (auto root = root_frame(*t, state)) add_unique(refs.writes, *root);
  }
  InplaceWrites inplace(state, refs.writes);
  for (const Expr* e : value_exprs(stmt)) syntax::walk(*e, inplace);
  return refs;
}

StatementAnalyzer::StatementAnalyzer(const TermIndex& terms, std::string notebook_ref, Diagnostics& diagnostics)
    : terms_(terms), notebook_ref_(std::move(notebook_ref)), diagnostics_(diagnostics) {}

void StatementAnalyzer::note(int cell, const char* category, std::string message) {
  diagnostics_.push_back(Diagnostic{notebook_ref_, cell, category, std::move(message)});
}

std::vector<SnippetRecord> StatementAnalyzer::analyze(const Stmt& stmt, FrameState& state, const ImportTable& table,
                                                      int cell) {
  std::vector<SnippetRecord> out;
  analyze_into(stmt, state, table, cell, 0, out);
  return out;
}

void StatementAnalyzer::analyze_body(const syntax::StmtList& body, FrameState& state, const ImportTable& table,
                                     int cell, int loop_depth, std::vector<SnippetRecord>& out) {
  for (const auto& s : body) analyze_into(*s, state, table, cell, loop_depth, out);
}

void StatementAnalyzer::analyze_into(const Stmt& stmt, FrameState& state, const ImportTable& table, int cell,
                                     int loop_depth, std::vector<SnippetRecord>& out) {
  switch (stmt.kind) {
    case StmtKind::Import:
    case StmtKind::ImportFrom:
    case StmtKind::FunctionDef:
      return;
    case StmtKind::For:
      analyze_body(stmt.body, state, table, cell, loop_depth + 1, out);
      analyze_body(stmt.orelse, state, table, cell, loop_depth, out);
      return;
    case StmtKind::Other:
      switch (stmt.other) {
        case OtherStmtKind::ClassDef:
          return;
        case OtherStmtKind::While:
          for (const auto& c : stmt.clauses) {
            analyze_body(c.body, state, table, cell, c.kind == syntax::ClauseKind::While ? loop_depth + 1 : loop_depth,
                         out);
          }
          return;
        case OtherStmtKind::If:
        case OtherStmtKind::Try:
        case OtherStmtKind::With:
          for (const auto& c : stmt.clauses) analyze_body(c.body, state, table, cell, loop_depth, out);
          return;
        default:
          break;
      }
      break;
    default:
      break;
  }
  if (auto record = analyze_simple(stmt, state, table, cell)) {
    if (loop_depth > 0) {
      note(cell, diag::kLoopBody,
           "line " + std::to_string(stmt.span.line) + ": '" + record->code +
               "' is inside a loop body; recorded once, iterations are not modeled");
    }
    out.push_back(std::move(*record));
  }
}

void StatementAnalyzer::adopt_implicit_frames(const Stmt& stmt, FrameState& state, const ImportTable& table,
                                              int cell) const {
  ImplicitFrames v;
  walk_loads(stmt, v, true);
  for (const auto& name : v.candidates) {
    if (state.contains(name) || terms_.binds(name) || table.find(name) != nullptr || is_builtin_name(name)) continue;
    FrameInfo info;
    info.creation_cell = cell;
    info.last_modified_cell = cell;
    state.create(name, std::move(info));
  }
}

std::optional<SnippetRecord> StatementAnalyzer::analyze_simple(const Stmt& stmt, FrameState& state,
                                                               const ImportTable& table, int cell) {
  int index = statement_counter_++;
  adopt_implicit_frames(stmt, state, table, cell);
  FrameRefs refs = detect_frame_refs(stmt, state, &table);
  if (refs.reads.empty() && refs.writes.empty()) {
    seed_frames(stmt, table, state, cell);
    return std::nullopt;
  }

  SnippetRecord r;
  r.code = syntax::render_source(stmt);
  r.snippet_cell_number = cell;
  r.statement_index = index;

  OperationType op = classify(stmt, state, table);
  auto has_read = [&](const std::string& name) {
    return std::find(refs.reads.begin(), refs.reads.end(), name) != refs.reads.end();
  };

  if (!refs.writes.empty()) {
    r.new_df = refs.writes.front();
    r.operation_type = std::string(label(op));
    const Expr* call = outermost_call(stmt);
    const Expr* value = statement_value(stmt);
    std::optional<std::string> receiver;
    if (call != nullptr && call->func().is(ExprKind::Attribute)) receiver = root_frame(call->func().value(), state);
    if (receiver && has_read(*receiver)) {
      r.prev_df = receiver;
    } else if (auto o = value != nullptr ? frame_origin(*value, state, table) : std::nullopt;
               o && o->derived_from && has_read(*o->derived_from)) {
      r.prev_df = o->derived_from;
    } else if (!refs.reads.empty()) {
      r.prev_df = refs.reads.front();
    } else {
      // In-place writes (`df['c'] = 1`) modify the frame they name; a plain
      // rebinding creates a fresh one.
      bool rebinding = false;
      for (const Binding& b : bindings_of(stmt)) {
        if (b.target->is(ExprKind::Name) && b.target->text == *r.new_df) rebinding = true;
      }
      if (!rebinding) r.prev_df = r.new_df;
    }

    auto inner = inner_labeled_calls(stmt, state, table);
    if (!inner.empty() && op != OperationType::None) {
      std::string joined;
      for (const auto& m : inner) joined += (joined.empty() ? "" : ", ") + m;
      note(cell, diag::kChainedCall,
           "line " + std::to_string(stmt.span.line) + ": classified as '" + r.operation_type +
               "'; inner calls not recorded: " + joined);
    }
    if (op == OperationType::Map || op == OperationType::Apply) {
      try {
        TermIndexResolver resolver(terms_);
        extract_transform_arg(stmt, resolver);
      } catch (const MissingArgument& e) {
        note(cell, diag::kMissingArgument, "line " + std::to_string(stmt.span.line) + ": " + e.what());
      }
    }
  }

  NameSet excluded;
  if (r.new_df) excluded.insert(*r.new_df);
  if (r.prev_df) excluded.insert(*r.prev_df);
  if (refs.writes.empty()) excluded.insert(refs.reads.begin(), refs.reads.end());
  for (const Binding& b : bindings_of(stmt)) {
    if (b.target->is(ExprKind::Name)) excluded.insert(b.target->text);
  }
  LocalBindings locals;
  syntax::walk(stmt, locals);
  LoadedNames loaded;
  walk_loads(stmt, loaded, true);
  for (const auto& name : loaded.names) {
    if (excluded.count(name) != 0 || locals.names.count(name) != 0) continue;
    if (table.find(name) != nullptr) continue;
    if (is_builtin_name(name) && !terms_.binds(name)) continue;
    VariableRoleReport report = terms_.analyze(name);
    Expr probe;
    probe.kind = ExprKind::Name;
    probe.text = name;
    r.required_variables.emplace(name, VariableDescriptor{terms_.classify(probe), report.rendered_source});
  }
  r.imports = imports_referenced_by(stmt, table).as_mapping();

  seed_frames(stmt, table, state, cell);
  return r;
}

std::vector<SnippetRecord> analyze_statement(const Stmt& stmt, FrameState& state, const ImportTable& table, int cell,
                                             const TermIndex& terms, Diagnostics* diagnostics) {
  Diagnostics scratch;
  StatementAnalyzer analyzer(terms, "", diagnostics != nullptr ? *diagnostics : scratch);
  return analyzer.analyze(stmt, state, table, cell);
}

NotebookTrace convert_notebook(const NotebookDocument& nb, std::optional<std::string> dataset_ref) {
  NotebookTrace trace;
  trace.notebook_ref = nb.notebook_ref;
  trace.dataset_ref = std::move(dataset_ref);

  struct ParsedCell {
    int index;
    syntax::SyntaxTree tree;
  };
  std::vector<ParsedCell> parsed;
  syntax::SyntaxTree whole;
  for (const Cell& cell : extract_code_cells(nb)) {
    SanitizedSource clean = sanitize_cell(cell);
    for (const DroppedLine& d : clean.dropped) {
      trace.diagnostics.push_back(Diagnostic{nb.notebook_ref, cell.index, diag::kMagicDropped,
                                             "dropped line " + std::to_string(d.line) + ": " + d.text});
    }
    try {
      syntax::SyntaxTree tree = syntax::parse_module(clean.text);
      whole.statements.insert(whole.statements.end(), tree.statements.begin(), tree.statements.end());
      parsed.push_back(ParsedCell{cell.index, std::move(tree)});
    } catch (const syntax::SyntaxError& e) {
      trace.diagnostics.push_back(Diagnostic{nb.notebook_ref, cell.index, diag::kSyntaxError, e.what()});
    }
  }

  TermIndex terms(whole);
  FrameState state;
  ImportTable table;
  StatementAnalyzer analyzer(terms, nb.notebook_ref, trace.diagnostics);
  for (const ParsedCell& cell : parsed) {
    analyzer.begin_cell();
    for (const auto& stmt : cell.tree.statements) {
      collect_imports(*stmt, cell.index, table, &trace.diagnostics);
      auto records = analyzer.analyze(*stmt, state, table, cell.index);
      for (auto& r : records) trace.records.push_back(std::move(r));
    }
  }
  for (auto& d : trace.diagnostics) {
    if (d.notebook_ref.empty()) d.notebook_ref = nb.notebook_ref;
  }
  // Parse problems are found in a first pass; report everything in cell order.
  std::stable_sort(trace.diagnostics.begin(), trace.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.cell.value_or(-1) < b.cell.value_or(-1); });
  return trace;
}

}  // namespace nbtrace
