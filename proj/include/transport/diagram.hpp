#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "transport/errors.hpp"

namespace transport {

// A causal DAG shared by the study and target populations, augmented with a
// selection node P. Immutable after construction; queries are pure.
class SelectionDiagram {
public:
    SelectionDiagram(std::vector<std::string> names,
                     std::vector<std::pair<int, int>> edges,
                     int treatment, int outcome, int selection,
                     std::vector<bool> latent);

    int node_count() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(int i) const { return names_[i]; }
    int index(const std::string& name) const; // throws UnknownNode

    int treatment() const { return treatment_; }
    int outcome() const { return outcome_; }
    int selection() const { return selection_; }
    bool is_latent(int i) const { return latent_[i]; }

    const std::vector<int>& parents(int i) const { return parents_[i]; }
    const std::vector<int>& children(int i) const { return children_[i]; }
    bool has_edge(int from, int to) const;

    std::set<int> descendants(int i) const; // includes i
    std::set<int> ancestors(const std::set<int>& nodes) const; // includes nodes

    // Copy of this diagram with all edges into `node` removed (do-operator).
    SelectionDiagram mutilate(int node) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    int treatment_, outcome_, selection_;
    std::vector<bool> latent_;
};

struct DSepQuery {
    std::string x;
    std::string y;
    std::set<std::string> given;
};

struct TransportabilityVerdict {
    bool transportable = false;
    std::set<std::string> witness_set;          // present iff transportable
    std::string reason;                         // open-path listing if not
};

struct BaselineReduction {
    bool ok = false;
    std::string reason;
    std::set<std::string> witness; // a baseline sufficient set when ok
};

// Line-oriented grammar: `node <name> [latent]`, `edge <a> -> <b>`,
// `treatment <name>`, `outcome <name>`, `selection <name>`, `#` comments.
SelectionDiagram parse_diagram(const std::string& text);
SelectionDiagram parse_diagram_file(const std::string& path);
// Canonical sorted form; parse(serialize(g)) == g.
std::string serialize_diagram(const SelectionDiagram& g);

// Standard d-separation via Bayes-ball reachability; O(nodes + edges).
bool d_separated(const SelectionDiagram& g, const DSepQuery& q);
bool d_separated(const SelectionDiagram& g, int x, int y, const std::set<int>& given);

// All inclusion-minimal V ⊆ candidates with |V| ≤ max_size separating the
// outcome from the selection node in the treatment-mutilated graph.
std::vector<std::set<std::string>> sufficient_adjustment_sets(
    const SelectionDiagram& g, const std::set<std::string>& candidates,
    int max_size = 6);

// Default candidate pool: observed non-descendants of treatment, excluding
// the role nodes.
std::set<std::string> baseline_candidates(const SelectionDiagram& g);

BaselineReduction check_baseline_reduction(const SelectionDiagram& g);

TransportabilityVerdict transportability(const SelectionDiagram& g, int max_size = 6);

} // namespace transport
