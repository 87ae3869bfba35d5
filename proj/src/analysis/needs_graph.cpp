#include "eqlog/analysis.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_set>

namespace eqlog::analysis {

namespace {

using Vertex = NeedsGraph::Vertex;

constexpr Vertex kNone = static_cast<Vertex>(-1);

/// Distinct graph vertices for the symbols and literals occurring in `goal`.
std::vector<Vertex> goal_vertices(const NeedsGraph& graph, const Term& goal, OpCounter* counter) {
  std::vector<Vertex> out;
  std::vector<bool> seen(graph.vertex_count(), false);
  for_each_subterm(goal, [&](const Term& t) {
    if (counter) counter->tick();
    if (t.is_var()) return;
    if (auto v = graph.find(t.head()); v && !seen[*v]) {
      seen[*v] = true;
      out.push_back(*v);
    }
  });
  return out;
}

std::vector<bool> reach_from(const NeedsGraph& graph, const std::vector<Vertex>& sources,
                             OpCounter* counter) {
  std::vector<bool> seen(graph.vertex_count(), false);
  std::vector<Vertex> stack;
  for (Vertex s : sources) {
    if (!seen[s]) {
      seen[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : graph.successors(v)) {
      if (counter) counter->tick();
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

std::optional<Vertex> NeedsGraph::find(const Atom& a) const {
  auto it = index_.find(a);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool NeedsGraph::has_edge(const Atom& from, const Atom& to) const {
  auto f = find(from);
  auto t = find(to);
  if (!f || !t) return false;
  const auto& s = succ_[*f];
  return std::find(s.begin(), s.end(), *t) != s.end();
}

std::vector<std::pair<Atom, Atom>> NeedsGraph::edges() const {
  std::vector<std::pair<Atom, Atom>> out;
  out.reserve(edge_count_);
  for (Vertex v = 0; v < atoms_.size(); ++v)
    for (Vertex w : succ_[v]) out.emplace_back(atoms_[v], atoms_[w]);
  return out;
}

Vertex NeedsGraph::intern(const Atom& a, const Program& program) {
  auto [it, inserted] = index_.emplace(a, static_cast<Vertex>(atoms_.size()));
  if (inserted) {
    atoms_.push_back(a);
    labels_.push_back(to_string(a, program));
    defined_.push_back(a.kind == Atom::Kind::Symbol && program.symbols().is_defined(a.symbol));
    succ_.emplace_back();
    in_degree_.push_back(0);
  }
  return it->second;
}

NeedsGraph build_needs_graph(const Program& program, OpCounter* counter) {
  NeedsGraph g;
  struct EdgeHash {
    std::size_t operator()(const std::pair<Vertex, Vertex>& e) const noexcept {
      return (static_cast<std::size_t>(e.first) << 32) ^ e.second;
    }
  };
  std::unordered_set<std::pair<Vertex, Vertex>, EdgeHash> seen;
  std::set<SymbolId> with_edges;
  std::set<SymbolId> defined;

  for (const Rule& rule : program.rules()) {
    defined.insert(rule.root());
    std::optional<Vertex> from;
    for_each_subterm(rule.rhs, [&](const Term& t) {
      if (counter) counter->tick();
      if (t.is_var()) return;
      if (!from) from = g.intern(Atom::of_symbol(rule.root()), program);
      Vertex to = g.intern(t.head(), program);
      if (seen.emplace(*from, to).second) {
        g.succ_[*from].push_back(to);
        ++g.in_degree_[to];
        ++g.edge_count_;
      }
    });
    if (from) with_edges.insert(rule.root());
  }
  std::set_difference(defined.begin(), defined.end(), with_edges.begin(), with_edges.end(),
                      std::back_inserter(g.defined_without_edges_));
  return g;
}

std::vector<bool> cycle_vertices(const NeedsGraph& graph, OpCounter* counter) {
  // Iterative Tarjan: a vertex is on a cycle iff its SCC has more than one
  // vertex or it has a self-loop.
  const std::size_t n = graph.vertex_count();
  std::vector<Vertex> index(n, kNone), low(n, 0);
  std::vector<bool> on_stack(n, false), result(n, false);
  std::vector<Vertex> scc_stack;
  struct Frame {
    Vertex v;
    std::size_t next;
  };
  std::vector<Frame> call;
  Vertex counter_index = 0;

  for (Vertex root = 0; root < n; ++root) {
    if (index[root] != kNone) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter_index++;
    scc_stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = graph.successors(f.v);
      if (f.next < succ.size()) {
        Vertex w = succ[f.next++];
        if (counter) counter->tick();
        if (w == f.v) result[w] = true;
        if (index[w] == kNone) {
          index[w] = low[w] = counter_index++;
          scc_stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      Vertex v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<Vertex> component;
        Vertex w;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        if (component.size() > 1)
          for (Vertex c : component) result[c] = true;
      }
    }
  }
  return result;
}

bool prop1_has_cycle(const NeedsGraph& graph, OpCounter* counter) {
  enum class Color : std::uint8_t { White, Grey, Black };
  const std::size_t n = graph.vertex_count();
  std::vector<Color> color(n, Color::White);
  std::vector<std::pair<Vertex, std::size_t>> stack;
  for (Vertex root = 0; root < n; ++root) {
    if (color[root] != Color::White) continue;
    color[root] = Color::Grey;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& succ = graph.successors(v);
      if (next == succ.size()) {
        color[v] = Color::Black;
        stack.pop_back();
        continue;
      }
      Vertex w = succ[next++];
      if (counter) counter->tick();
      if (color[w] == Color::Grey) return true;  // back edge
      if (color[w] == Color::White) {
        color[w] = Color::Grey;
        stack.emplace_back(w, 0);
      }
    }
  }
  return false;
}

bool prop2_termination_condition(const NeedsGraph& graph, const Term& goal, OpCounter* counter) {
  std::vector<bool> marked = cycle_vertices(graph, counter);
  std::vector<bool> reached = reach_from(graph, goal_vertices(graph, goal, counter), counter);
  for (Vertex v = 0; v < graph.vertex_count(); ++v)
    if (marked[v] && reached[v]) return true;
  return false;
}

bool prop3_efficiency_condition(const NeedsGraph& graph, OpCounter* counter) {
  for (Vertex v = 0; v < graph.vertex_count(); ++v) {
    if (counter) counter->tick();
    if (graph.in_degree(v) >= 1 && graph.out_degree(v) >= 1) return true;
  }
  return false;
}

bool prop4_efficiency_condition_term(const NeedsGraph& graph, const Term& goal,
                                     std::size_t min_chain, OpCounter* counter) {
  const std::size_t n = graph.vertex_count();

  // chain[v]: v starts a directed path of at least min_chain edges.
  std::vector<bool> chain(n, true);
  for (std::size_t round = 0; round < min_chain; ++round) {
    std::vector<bool> next(n, false);
    for (Vertex v = 0; v < n; ++v)
      for (Vertex w : graph.successors(v)) {
        if (counter) counter->tick();
        if (chain[w]) {
          next[v] = true;
          break;
        }
      }
    chain = std::move(next);
  }

  // Each vertex records up to two distinct goal sources that reach it, so
  // every vertex is expanded at most twice.
  std::vector<Vertex> first(n, kNone), second(n, kNone);
  std::deque<std::pair<Vertex, Vertex>> queue;
  auto offer = [&](Vertex v, Vertex source) {
    if (first[v] == source || second[v] == source || second[v] != kNone) return;
    (first[v] == kNone ? first[v] : second[v]) = source;
    queue.emplace_back(v, source);
  };
  for (Vertex s : goal_vertices(graph, goal, counter)) offer(s, s);
  while (!queue.empty()) {
    auto [v, source] = queue.front();
    queue.pop_front();
    for (Vertex w : graph.successors(v)) {
      if (counter) counter->tick();
      offer(w, source);
    }
  }
  for (Vertex v = 0; v < n; ++v)
    if (second[v] != kNone && graph.in_degree(v) > 1 && chain[v]) return true;
  return false;
}

std::set<SymbolId> reachable_defined_symbols(const Program& program, const NeedsGraph& graph,
                                             const Term& goal, OpCounter* counter) {
  std::set<SymbolId> out;
  for_each_subterm(goal, [&](const Term& t) {
    if (t.is_app() && program.symbols().is_defined(t.symbol())) out.insert(t.symbol());
  });
  std::vector<bool> reached = reach_from(graph, goal_vertices(graph, goal, counter), counter);
  for (Vertex v = 0; v < graph.vertex_count(); ++v)
    if (reached[v] && graph.is_defined(v)) out.insert(graph.atom(v).symbol);
  return out;
}

std::set<RuleId> prunable_rules(const Program& program, const std::set<SymbolId>& reachable) {
  std::set<RuleId> out;
  for (const Rule& r : program.rules())
    if (!reachable.contains(r.root())) out.insert(r.id);
  return out;
}

std::string to_dot(const NeedsGraph& graph) {
  if (graph.vertex_count() == 0) return "digraph needs {}\n";
  std::vector<bool> cyc = cycle_vertices(graph);
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  std::string out = "digraph needs {\n";
  for (Vertex v = 0; v < graph.vertex_count(); ++v) {
    out += "  " + quote(graph.label(v)) + " [shape=" + (graph.is_defined(v) ? "box" : "ellipse");
    if (cyc[v]) out += ", color=red";
    out += "];\n";
  }
  for (Vertex v = 0; v < graph.vertex_count(); ++v)
    for (Vertex w : graph.successors(v))
      out += "  " + quote(graph.label(v)) + " -> " + quote(graph.label(w)) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace eqlog::analysis
