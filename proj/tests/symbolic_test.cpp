#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "lspkit/symbolic/mcts.hpp"
#include "lspkit/tt/io.hpp"

using namespace lspkit;

namespace {

using Names = std::vector<std::string>;

// plain DFS over operator chains, independent of the tree search
void enumerate(const TaskDomain& d, const SymbolicState& s, std::size_t max_len, Names& prefix,
               const std::function<void(const Names&, const SymbolicState&, bool)>& visit) {
    bool dead_end = true;
    for (const auto& op : d.operators) {
        bool ok = true;
        for (const auto& a : op.pre_pos) {
            ok = ok && s.atoms().count(a) == 1;
        }
        for (const auto& a : op.pre_neg) {
            ok = ok && s.atoms().count(a) == 0;
        }
        if (!ok) {
            continue;
        }
        dead_end = false;
        if (prefix.size() == max_len) {
            continue;
        }
        auto atoms = s.atoms();
        for (const auto& a : op.del) {
            atoms.erase(a);
        }
        for (const auto& a : op.add) {
            atoms.insert(a);
        }
        prefix.push_back(op.name);
        enumerate(d, SymbolicState(std::vector<std::string>(atoms.begin(), atoms.end())), max_len, prefix, visit);
        prefix.pop_back();
    }
    visit(prefix, s, dead_end);
}

TaskDomain domain(const std::string& name) { return load_task_domain(default_domain_path(name)); }

Names applicable_names(const TaskDomain& d, const SymbolicState& s) {
    return d.skeleton_names(applicable(s, d.operators));
}

} // namespace

TEST(Symbolic, CanonicalAtoms) {
    EXPECT_EQ(canonical_atom("(AtWall  o)"), "AtWall o");
    EXPECT_EQ(canonical_atom(" ReadyPull t o "), "ReadyPull t o");
    EXPECT_THROW(canonical_atom("()"), ParseError);
    SymbolicState s{"(onTable o)", "AtWall o", "AtWall o"};
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.dump(), "(AtWall o)\n(onTable o)\n");
}

TEST(Symbolic, Applicable) {
    const auto npm = domain("npm");
    EXPECT_EQ(applicable_names(npm, npm.initial_state), (Names{"push_wall", "pull_wall"}));
    EXPECT_TRUE(applicable_names(npm, SymbolicState{}).empty());
    const Names at_wall = applicable_names(npm, SymbolicState{"AtWall o"});
    EXPECT_EQ(at_wall, (Names{"pivot"}));
    const auto ppm = domain("ppm");
    EXPECT_EQ(applicable_names(ppm, ppm.initial_state),
              (Names{"push_wall", "pull_wall", "pull_edge", "push_edge"}));
}

TEST(Symbolic, Successor) {
    const auto npm = domain("npm");
    const auto& ops = npm.operators;
    const auto s1 = succ(npm.initial_state, ops[npm.operator_index("push_wall")]);
    EXPECT_EQ(s1, (SymbolicState{"AtWall o", "onTable o"}));
    const auto s2 = succ(SymbolicState{"AtWall o"}, ops[npm.operator_index("pivot")]);
    EXPECT_EQ(s2, (SymbolicState{"AtWall o", "AfterFlip o"}));
    const auto s3 = succ(SymbolicState{"AtWall o", "AfterFlip o", "onTable o"}, ops[npm.operator_index("pull_center")]);
    EXPECT_EQ(s3, (SymbolicState{"AfterFlip o", "onTable o"}));
    EXPECT_THROW(succ(npm.initial_state, ops[npm.operator_index("pivot")]), PreconditionError);
    EXPECT_THROW(replay(npm.initial_state, ops, npm.skeleton_from_names({"push_wall", "pull_center"})),
                 PreconditionError);
}

TEST(Symbolic, ParseErrors) {
    auto j = read_json(default_domain_path("npm"));
    auto bad = j;
    bad["operators"][0]["add"] = {"Flying o"};
    EXPECT_THROW(parse_task_domain(bad), ParseError);
    bad = j;
    bad["operators"][1]["entry"][0]["kind"] = "near";
    EXPECT_THROW(parse_task_domain(bad), ParseError);
    bad = j;
    bad["lower"] = {0.0};
    EXPECT_THROW(parse_task_domain(bad), ParseError);
    EXPECT_THROW(domain("npm").operator_index("fly"), ConfigError);
}

TEST(Symbolic, NpmLengthThreeChains) {
    const auto npm = domain("npm");
    std::set<Names> found;
    Names prefix;
    enumerate(npm, npm.initial_state, 3, prefix, [&](const Names& chain, const SymbolicState&, bool dead_end) {
        if (chain.size() == 3 && dead_end) {
            found.insert(chain);
        }
    });
    const std::set<Names> expect = {{"push_wall", "pivot", "pull_center"}, {"pull_wall", "pivot", "pull_center"}};
    EXPECT_EQ(found, expect);
}

TEST(Symbolic, PpmSkeletons) {
    const auto ppm = domain("ppm");
    const std::vector<Names> chains = {{"push_edge", "pick_edge"},
                                       {"pull_edge", "pick_edge"},
                                       {"push_wall", "pivot", "pull_center", "pick_center"},
                                       {"pull_wall", "pivot", "pull_center", "pick_center"}};
    for (const auto& c : chains) {
        const auto s = replay(ppm.initial_state, ppm.operators, ppm.skeleton_from_names(c));
        EXPECT_TRUE(s.contains("InHand o")) << c.front();
        EXPECT_FALSE(s.contains("HandEmpty r"));
    }
}

TEST(Symbolic, PmShortestChainIsUnique) {
    const auto pm = domain("pm");
    std::set<Names> found;
    Names prefix;
    enumerate(pm, pm.initial_state, 5, prefix, [&](const Names& chain, const SymbolicState& s, bool) {
        if (s.contains("InHand o")) {
            found.insert(chain);
        }
    });
    const std::set<Names> expect = {{"pick_tool", "place_toolmove", "pull_tool", "place_tool", "pick_object"}};
    EXPECT_EQ(found, expect);
}

TEST(Mcts, Ucb1) {
    EXPECT_TRUE(std::isinf(ucb1(0.0, 0.0, 5.0, 3.0)));
    EXPECT_DOUBLE_EQ(ucb1(1.0, 1.0, 1.0, 3.0), 1.0);
    EXPECT_NEAR(ucb1(0.0, 2.0, 8.0, 3.0), 4.3261, 1e-4);
}

TEST(Mcts, FailureAtRoot) {
    const auto npm = domain("npm");
    MctsOptions o;
    o.max_len = 0;
    SkeletonTree t(npm, npm.initial_state, o);
    EXPECT_FALSE(t.propose().ok);
    SkeletonTree empty(npm, SymbolicState{}, {});
    const auto p = empty.propose();
    EXPECT_FALSE(p.ok);
    EXPECT_TRUE(p.skeleton.empty());
}

TEST(Mcts, Backprop) {
    const auto npm = domain("npm");
    SkeletonTree t(npm, npm.initial_state, {});
    SkeletonProposal single;
    single.path = {0};
    t.backprop(single, 1.0);
    EXPECT_EQ(t.root().visits, 1.0);
    EXPECT_EQ(t.root().reward, 1.0);

    // both depth-1 children visited once, so the third proposal goes one level deeper
    SkeletonTree w(npm, npm.initial_state, {});
    for (int k = 0; k < 2; ++k) {
        w.backprop(w.propose(), 0.0);
    }
    const auto c = w.propose();
    ASSERT_EQ(c.path.size(), 3u);
    w.backprop(c, 0.0);
    w.backprop(c, 0.0);
    EXPECT_EQ(w.node(c.path[2]).visits, 2.0);
    EXPECT_EQ(w.node(c.path[2]).reward, 0.0);
    for (double r : {1.0, 0.0, 1.0}) {
        w.backprop(c, r);
    }
    EXPECT_EQ(w.node(c.path[2]).visits, 5.0);
    EXPECT_EQ(w.node(c.path[2]).reward, 2.0);
}

TEST(Mcts, ProposalsReplayAndCover) {
    const auto npm = domain("npm");
    MctsOptions o;
    o.exploration = 3.0;
    o.seed = 7;
    SkeletonTree t(npm, npm.initial_state, o);
    std::set<Names> seen;
    const int calls = 10000;
    for (int k = 0; k < calls; ++k) {
        const auto p = t.propose();
        ASSERT_TRUE(p.ok);
        ASSERT_LE(p.skeleton.size(), o.max_len);
        ASSERT_NO_THROW(replay(npm.initial_state, npm.operators, p.skeleton));
        seen.insert(npm.skeleton_names(p.skeleton));
        t.backprop(p, 0.0);
    }
    EXPECT_TRUE(seen.count({"push_wall", "pivot", "pull_center"}));
    EXPECT_TRUE(seen.count({"pull_wall", "pivot", "pull_center"}));
    EXPECT_EQ(t.root().visits, static_cast<double>(calls));
}

TEST(Mcts, ReachedStopsSimulation) {
    const auto pm = domain("pm");
    MctsOptions o;
    o.reached = [](const SymbolicState& s, const std::vector<std::size_t>&) { return s.contains("InHand o"); };
    SkeletonTree t(pm, pm.initial_state, o);
    std::size_t stopped = 0;
    for (int k = 0; k < 200; ++k) {
        const auto p = t.propose();
        // simulated steps never start from a reached state
        SymbolicState s = pm.initial_state;
        for (std::size_t i = 0; i < p.skeleton.size(); ++i) {
            if (i + 1 >= p.path.size()) {
                ASSERT_FALSE(s.contains("InHand o"));
            }
            s = succ(s, pm.operators[p.skeleton[i]]);
        }
        stopped += s.contains("InHand o") && p.skeleton.size() < o.max_len;
        t.backprop(p, 0.0);
    }
    EXPECT_GT(stopped, 0u);
}

TEST(Mcts, Deterministic) {
    const auto npm = domain("npm");
    MctsOptions o;
    o.seed = 11;
    SkeletonTree a(npm, npm.initial_state, o);
    SkeletonTree b(npm, npm.initial_state, o);
    for (int k = 0; k < 50; ++k) {
        const auto pa = a.propose();
        const auto pb = b.propose();
        ASSERT_EQ(pa.skeleton, pb.skeleton);
        a.backprop(pa, k % 3 == 0 ? 1.0 : 0.0);
        b.backprop(pb, k % 3 == 0 ? 1.0 : 0.0);
    }
    std::ostringstream da, db;
    a.dump(da);
    b.dump(db);
    EXPECT_EQ(da.str(), db.str());
    EXPECT_NE(da.str().find("push_wall"), std::string::npos);
}
