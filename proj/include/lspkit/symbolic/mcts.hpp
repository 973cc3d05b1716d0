#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "lspkit/symbolic/domain.hpp"
#include "lspkit/util/rng.hpp"

namespace lspkit {

/// w/v + C * sqrt(2 ln N / v); unvisited children score +inf.
inline double ucb1(double w, double v, double parent_visits, double exploration) {
    if (v <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (parent_visits < 1.0) {
        parent_visits = 1.0;
    }
    return w / v + exploration * std::sqrt(2.0 * std::log(parent_visits) / v);
}

struct MctsOptions {
    double exploration = 1.0;
    std::size_t max_len = 6;
    std::uint64_t seed = 0;
    /// Stops a simulation early once the partial skeleton reaches the target.
    std::function<bool(const SymbolicState&, const std::vector<std::size_t>&)> reached;
};

struct SkeletonProposal {
    bool ok = false;
    std::vector<std::size_t> skeleton;
    std::vector<std::size_t> path; // tree nodes, root first
};

/// Search tree over operator sequences.
class SkeletonTree {
public:
    struct Node {
        SymbolicState state;
        std::size_t op = 0; // incoming operator
        std::size_t parent = 0;
        std::size_t depth = 0;
        double visits = 0.0;
        double reward = 0.0;
        std::vector<std::size_t> children;
        std::vector<std::size_t> untried;
    };

    SkeletonTree(const TaskDomain& domain, SymbolicState s0, MctsOptions opt = {})
        : domain_(&domain), opt_(std::move(opt)), rng_(derive_seed(opt_.seed, 0x6d637473)) {
        Node root;
        root.state = std::move(s0);
        root.parent = kNone;
        root.untried = terminal_state(root.state, 0) ? std::vector<std::size_t>{}
                                                     : applicable(root.state, domain.operators);
        nodes_.push_back(std::move(root));
    }

    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    SkeletonProposal propose() {
        SkeletonProposal p;
        if (terminal_state(nodes_[0].state, 0)) {
            return p;
        }
        std::size_t n = 0;
        p.path.push_back(0);
        while (!terminal_state(nodes_[n].state, nodes_[n].depth)) {
            if (!nodes_[n].untried.empty()) {
                n = expand(n);
                p.path.push_back(n);
                p.skeleton.push_back(nodes_[n].op);
                break;
            }
            n = best_child(n);
            p.path.push_back(n);
            p.skeleton.push_back(nodes_[n].op);
        }
        SymbolicState s = nodes_[n].state;
        std::size_t depth = nodes_[n].depth;
        while (!terminal_state(s, depth) && !(opt_.reached && opt_.reached(s, p.skeleton))) {
            const auto app = applicable(s, domain_->operators);
            const std::size_t k = app[uniform_index(rng_, app.size())];
            s = succ(s, domain_->operators[k]);
            p.skeleton.push_back(k);
            ++depth;
        }
        p.ok = true;
        return p;
    }

    void backprop(const SkeletonProposal& p, double reward) {
        for (std::size_t n : p.path) {
            nodes_.at(n).visits += 1.0;
            nodes_.at(n).reward += reward;
        }
    }

    const Node& node(std::size_t i) const { return nodes_.at(i); }
    const Node& root() const { return nodes_[0]; }
    std::size_t size() const { return nodes_.size(); }
    const MctsOptions& options() const { return opt_; }

    /// Indented tree with visit counts and UCB scores.
    void dump(std::ostream& os) const { dump_node(os, 0, 0); }

private:
    bool terminal_state(const SymbolicState& s, std::size_t depth) const {
        if (depth >= opt_.max_len) {
            return true;
        }
        return applicable(s, domain_->operators).empty();
    }

    std::size_t expand(std::size_t n) {
        const std::size_t op = nodes_[n].untried.front();
        nodes_[n].untried.erase(nodes_[n].untried.begin());
        Node c;
        c.state = succ(nodes_[n].state, domain_->operators[op]);
        c.op = op;
        c.parent = n;
        c.depth = nodes_[n].depth + 1;
        if (!terminal_state(c.state, c.depth)) {
            c.untried = applicable(c.state, domain_->operators);
        }
        nodes_.push_back(std::move(c));
        nodes_[n].children.push_back(nodes_.size() - 1);
        return nodes_.size() - 1;
    }

    std::size_t best_child(std::size_t n) const {
        std::size_t best = nodes_[n].children.front();
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c : nodes_[n].children) {
            const double sc = ucb1(nodes_[c].reward, nodes_[c].visits, nodes_[n].visits, opt_.exploration);
            if (sc > best_score) {
                best_score = sc;
                best = c;
            }
        }
        return best;
    }

    void dump_node(std::ostream& os, std::size_t n, std::size_t indent) const {
        const Node& x = nodes_[n];
        os << std::string(2 * indent, ' ');
        if (n == 0) {
            os << "root";
        } else {
            os << domain_->operators[x.op].name;
        }
        os << " v=" << x.visits << " w=" << x.reward;
        if (n != 0) {
            os << " ucb=" << ucb1(x.reward, x.visits, nodes_[x.parent].visits, opt_.exploration);
        }
        os << '\n';
        for (std::size_t c : x.children) {
            dump_node(os, c, indent + 1);
        }
    }

    const TaskDomain* domain_;
    MctsOptions opt_;
    Rng rng_;
    std::vector<Node> nodes_;
};

} // namespace lspkit
