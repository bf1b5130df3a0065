#include "transport/diagram.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>

namespace transport {

SelectionDiagram::SelectionDiagram(std::vector<std::string> names,
                                   std::vector<std::pair<int, int>> edges,
                                   int treatment, int outcome, int selection,
                                   std::vector<bool> latent)
    : names_(std::move(names)),
      treatment_(treatment),
      outcome_(outcome),
      selection_(selection),
      latent_(std::move(latent)) {
    int n = static_cast<int>(names_.size());
    parents_.assign(n, {});
    children_.assign(n, {});
    for (auto [from, to] : edges) {
        parents_[to].push_back(from);
        children_[from].push_back(to);
    }
    for (auto& v : parents_) std::sort(v.begin(), v.end());
    for (auto& v : children_) std::sort(v.begin(), v.end());

    auto check_role = [&](int idx, const char* role) {
        if (idx < 0 || idx >= n)
            throw RoleError(std::string("missing ") + role + " node");
    };
    check_role(treatment_, "treatment");
    check_role(outcome_, "outcome");
    check_role(selection_, "selection");
    if (treatment_ == outcome_ || treatment_ == selection_ || outcome_ == selection_)
        throw RoleError("treatment, outcome and selection must be distinct nodes");

    // acyclicity via Kahn's algorithm
    std::vector<int> indeg(n, 0);
    for (int i = 0; i < n; ++i) indeg[i] = static_cast<int>(parents_[i].size());
    std::queue<int> q;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) q.push(i);
    int seen = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        ++seen;
        for (int c : children_[u])
            if (--indeg[c] == 0) q.push(c);
    }
    if (seen != n) throw CycleError("diagram contains a directed cycle");

    if (!parents_[selection_].empty()) {
        auto desc_a = descendants(treatment_);
        for (int par : parents_[selection_])
            if (desc_a.count(par))
                throw SelectionAfterTreatment(
                    "selection node '" + names_[selection_] +
                    "' is a downstream consequence of treatment (via '" +
                    names_[par] + "')");
        throw RoleError("selection node '" + names_[selection_] +
                        "' must be a root (no incoming edges)");
    }
}

int SelectionDiagram::index(const std::string& name) const {
    for (int i = 0; i < node_count(); ++i)
        if (names_[i] == name) return i;
    throw UnknownNode("node '" + name + "' not in diagram");
}

bool SelectionDiagram::has_edge(int from, int to) const {
    return std::binary_search(children_[from].begin(), children_[from].end(), to);
}

std::set<int> SelectionDiagram::descendants(int i) const {
    std::set<int> out{i};
    std::deque<int> q{i};
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int c : children_[u])
            if (out.insert(c).second) q.push_back(c);
    }
    return out;
}

std::set<int> SelectionDiagram::ancestors(const std::set<int>& nodes) const {
    std::set<int> out = nodes;
    std::deque<int> q(nodes.begin(), nodes.end());
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int p : parents_[u])
            if (out.insert(p).second) q.push_back(p);
    }
    return out;
}

SelectionDiagram SelectionDiagram::mutilate(int node) const {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < node_count(); ++i)
        for (int c : children_[i])
            if (c != node) edges.emplace_back(i, c);
    return SelectionDiagram(names_, edges, treatment_, outcome_, selection_, latent_);
}

namespace {

struct Statement {
    int lineno;
    std::vector<std::string> tokens;
};

} // namespace

SelectionDiagram parse_diagram(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    std::vector<std::string> names;
    std::vector<bool> latent;
    std::map<std::string, int> index;
    std::vector<std::pair<int, int>> edges;
    std::string treatment, outcome, selection;

    auto fail = [&](const std::string& msg) -> void {
        throw ParseError("line " + std::to_string(lineno) + ": " + msg);
    };
    auto lookup = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end()) fail("unknown node '" + name + "'");
        return it->second;
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty()) continue;

        if (tok[0] == "node") {
            if (tok.size() < 2 || tok.size() > 3 ||
                (tok.size() == 3 && tok[2] != "latent"))
                fail("expected 'node <name> [latent]'");
            if (index.count(tok[1])) fail("duplicate node '" + tok[1] + "'");
            index[tok[1]] = static_cast<int>(names.size());
            names.push_back(tok[1]);
            latent.push_back(tok.size() == 3);
        } else if (tok[0] == "edge") {
            if (tok.size() != 4 || tok[2] != "->")
                fail("expected 'edge <from> -> <to>'");
            edges.emplace_back(lookup(tok[1]), lookup(tok[3]));
        } else if (tok[0] == "treatment" || tok[0] == "outcome" ||
                   tok[0] == "selection") {
            if (tok.size() != 2) fail("expected '" + tok[0] + " <name>'");
            lookup(tok[1]);
            std::string& slot = tok[0] == "treatment" ? treatment
                              : tok[0] == "outcome"   ? outcome
                                                      : selection;
            if (!slot.empty())
                throw RoleError("duplicate " + tok[0] + " declaration (line " +
                                std::to_string(lineno) + ")");
            slot = tok[1];
        } else {
            fail("unknown statement '" + tok[0] + "'");
        }
    }

    auto role = [&](const std::string& name, const char* what) {
        if (name.empty()) throw RoleError(std::string("missing ") + what + " declaration");
        return index[name];
    };
    return SelectionDiagram(names, edges, role(treatment, "treatment"),
                            role(outcome, "outcome"), role(selection, "selection"),
                            latent);
}

SelectionDiagram parse_diagram_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_diagram(ss.str());
}

std::string serialize_diagram(const SelectionDiagram& g) {
    std::vector<int> order(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return g.name(a) < g.name(b); });

    std::ostringstream out;
    for (int i : order) {
        out << "node " << g.name(i);
        if (g.is_latent(i)) out << " latent";
        out << "\n";
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < g.node_count(); ++i)
        for (int c : g.children(i)) edges.emplace_back(g.name(i), g.name(c));
    std::sort(edges.begin(), edges.end());
    for (const auto& [a, b] : edges) out << "edge " << a << " -> " << b << "\n";
    out << "treatment " << g.name(g.treatment()) << "\n";
    out << "outcome " << g.name(g.outcome()) << "\n";
    out << "selection " << g.name(g.selection()) << "\n";
    return out.str();
}

bool d_separated(const SelectionDiagram& g, int x, int y, const std::set<int>& given) {
    if (x == y) throw UnknownNode("d-separation query with x == y");
    if (given.count(x) || given.count(y))
        throw UnknownNode("query endpoints must not be conditioned on");

    // Bayes-ball reachability. States are (node, direction of arrival):
    // up = arrived from a child, down = arrived from a parent.
    std::set<int> anc = g.ancestors(given);
    int n = g.node_count();
    std::vector<bool> seen_up(n, false), seen_down(n, false);
    std::deque<std::pair<int, bool>> q; // (node, arrived_from_child)
    q.emplace_back(x, true);
    seen_up[x] = true;
    while (!q.empty()) {
        auto [u, from_child] = q.front();
        q.pop_front();
        if (u == y) return false; // reachable => d-connected
        if (from_child) {
            if (given.count(u)) continue;
            for (int p : g.parents(u))
                if (!seen_up[p]) { seen_up[p] = true; q.emplace_back(p, true); }
            for (int c : g.children(u))
                if (!seen_down[c]) { seen_down[c] = true; q.emplace_back(c, false); }
        } else {
            if (!given.count(u)) {
                for (int c : g.children(u))
                    if (!seen_down[c]) { seen_down[c] = true; q.emplace_back(c, false); }
            }
            if (anc.count(u)) { // collider at u is opened by conditioning
                for (int p : g.parents(u))
                    if (!seen_up[p]) { seen_up[p] = true; q.emplace_back(p, true); }
            }
        }
    }
    return true;
}

bool d_separated(const SelectionDiagram& g, const DSepQuery& q) {
    std::set<int> given;
    for (const auto& name : q.given) given.insert(g.index(name));
    return d_separated(g, g.index(q.x), g.index(q.y), given);
}

std::set<std::string> baseline_candidates(const SelectionDiagram& g) {
    auto desc_a = g.descendants(g.treatment());
    std::set<std::string> out;
    for (int i = 0; i < g.node_count(); ++i) {
        if (i == g.treatment() || i == g.outcome() || i == g.selection()) continue;
        if (g.is_latent(i) || desc_a.count(i)) continue;
        out.insert(g.name(i));
    }
    return out;
}

namespace {

// Enumerates subsets of `pool` ascending by size and keeps the minimal
// separators of Y and P in the treatment-mutilated graph.
std::vector<std::set<int>> minimal_separators(const SelectionDiagram& g,
                                              const std::vector<int>& pool,
                                              int max_size) {
    SelectionDiagram cut = g.mutilate(g.treatment());
    std::vector<std::set<int>> found;
    int n = static_cast<int>(pool.size());
    max_size = std::min(max_size, n);
    for (int size = 0; size <= max_size; ++size) {
        std::vector<int> pick(size);
        std::function<void(int, int)> rec = [&](int start, int depth) {
            if (depth == size) {
                std::set<int> subset(pick.begin(), pick.end());
                for (const auto& prev : found)
                    if (std::includes(subset.begin(), subset.end(), prev.begin(),
                                      prev.end()))
                        return; // superset of a minimal set
                if (d_separated(cut, cut.outcome(), cut.selection(), subset))
                    found.push_back(std::move(subset));
                return;
            }
            for (int i = start; i < n; ++i) {
                pick[depth] = pool[i];
                rec(i + 1, depth + 1);
            }
        };
        rec(0, 0);
    }
    return found;
}

} // namespace

std::vector<std::set<std::string>> sufficient_adjustment_sets(
    const SelectionDiagram& g, const std::set<std::string>& candidates,
    int max_size) {
    auto desc_a = g.descendants(g.treatment());
    std::vector<int> pool;
    for (const auto& name : candidates) {
        int i = g.index(name);
        if (i == g.outcome() || i == g.selection())
            throw NonBaselineCandidate("candidate '" + name + "' is a role node");
        if (desc_a.count(i))
            throw NonBaselineCandidate("candidate '" + name +
                                       "' is a descendant of treatment");
        if (g.is_latent(i))
            throw NonBaselineCandidate("candidate '" + name + "' is latent");
        pool.push_back(i);
    }
    std::vector<std::set<std::string>> out;
    for (const auto& s : minimal_separators(g, pool, max_size)) {
        std::set<std::string> names;
        for (int i : s) names.insert(g.name(i));
        out.push_back(std::move(names));
    }
    return out;
}

BaselineReduction check_baseline_reduction(const SelectionDiagram& g) {
    auto sets = sufficient_adjustment_sets(g, baseline_candidates(g),
                                           g.node_count());
    if (!sets.empty())
        return BaselineReduction{true, "baseline sufficient set exists", sets.front()};

    BaselineReduction out;
    out.ok = false;
    if (g.has_edge(g.selection(), g.outcome())) {
        out.reason = "direct edge " + g.name(g.selection()) + " -> " +
                     g.name(g.outcome()) + " cannot be blocked";
        return out;
    }
    // Would conditioning on post-treatment nodes help?
    auto desc_a = g.descendants(g.treatment());
    std::vector<int> pool;
    for (int i = 0; i < g.node_count(); ++i) {
        if (i == g.treatment() || i == g.outcome() || i == g.selection()) continue;
        if (g.is_latent(i)) continue;
        pool.push_back(i);
    }
    if (!minimal_separators(g, pool, g.node_count()).empty())
        out.reason = "every separator requires a post-treatment covariate";
    else
        out.reason = "no separator exists over observed nodes";
    return out;
}

namespace {

// First active simple path between x and y given Z, as a printable string.
// Exponential in the worst case; used for diagnostics on small diagrams.
std::string find_open_path(const SelectionDiagram& g, int x, int y,
                           const std::set<int>& given) {
    int n = g.node_count();
    std::vector<std::set<int>> desc(n);
    for (int i = 0; i < n; ++i) desc[i] = g.descendants(i);
    auto collider_open = [&](int node) {
        for (int d : desc[node])
            if (given.count(d)) return true;
        return false;
    };

    std::vector<int> path{x};
    std::vector<bool> used(n, false);
    used[x] = true;
    std::string result;

    std::function<bool()> rec = [&]() -> bool {
        int u = path.back();
        if (u == y) {
            // verify blocking along the path
            for (size_t i = 1; i + 1 < path.size(); ++i) {
                int prev = path[i - 1], node = path[i], next = path[i + 1];
                bool in_prev = g.has_edge(prev, node);
                bool in_next = g.has_edge(next, node);
                bool collider = in_prev && in_next;
                if (collider ? !collider_open(node) : given.count(node) > 0)
                    return false;
            }
            std::string s;
            for (size_t i = 0; i < path.size(); ++i) {
                if (i > 0)
                    s += g.has_edge(path[i - 1], path[i]) ? " -> " : " <- ";
                s += g.name(path[i]);
            }
            result = s;
            return true;
        }
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            if (!g.has_edge(u, v) && !g.has_edge(v, u)) continue;
            used[v] = true;
            path.push_back(v);
            if (rec()) return true;
            path.pop_back();
            used[v] = false;
        }
        return false;
    };
    rec();
    return result;
}

} // namespace

TransportabilityVerdict transportability(const SelectionDiagram& g, int max_size) {
    TransportabilityVerdict v;
    auto sets = sufficient_adjustment_sets(g, baseline_candidates(g), max_size);
    if (!sets.empty()) {
        v.transportable = true;
        v.witness_set = sets.front();
        v.reason = "outcome d-separated from selection given witness set";
        return v;
    }
    std::set<int> given;
    for (const auto& name : baseline_candidates(g)) given.insert(g.index(name));
    SelectionDiagram cut = g.mutilate(g.treatment());
    std::string path = find_open_path(cut, cut.outcome(), cut.selection(), given);
    v.transportable = false;
    v.reason = path.empty()
                   ? "no baseline sufficient set within size limit"
                   : "open path given all baseline candidates: " + path;
    return v;
}

} // namespace transport
