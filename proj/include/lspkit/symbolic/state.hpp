#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lspkit/util/error.hpp"

namespace lspkit {

/// Ground atom "(Pred a b)" stored in canonical form "Pred a b".
inline std::string canonical_atom(const std::string& text) {
    std::string s = text;
    for (char& c : s) {
        if (c == '(' || c == ')' || c == '\t' || c == '\n') {
            c = ' ';
        }
    }
    std::istringstream is(s);
    std::string tok;
    std::string out;
    while (is >> tok) {
        if (!out.empty()) {
            out += ' ';
        }
        out += tok;
    }
    if (out.empty()) {
        throw ParseError("empty atom '" + text + "'");
    }
    return out;
}

inline std::string atom_predicate(const std::string& atom) { return atom.substr(0, atom.find(' ')); }

/// Closed-world set of ground atoms.
class SymbolicState {
public:
    SymbolicState() = default;
    SymbolicState(std::initializer_list<std::string> atoms) {
        for (const auto& a : atoms) {
            insert(a);
        }
    }
    explicit SymbolicState(const std::vector<std::string>& atoms) {
        for (const auto& a : atoms) {
            insert(a);
        }
    }

    void insert(const std::string& a) { atoms_.insert(canonical_atom(a)); }
    void erase(const std::string& a) { atoms_.erase(canonical_atom(a)); }
    bool contains(const std::string& a) const { return atoms_.count(a) > 0; }
    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }
    const std::set<std::string>& atoms() const { return atoms_; }

    bool operator==(const SymbolicState& o) const { return atoms_ == o.atoms_; }
    bool operator<(const SymbolicState& o) const { return atoms_ < o.atoms_; }

    /// Sorted atom list, one "(Pred args)" per line.
    std::string dump() const {
        std::string out;
        for (const auto& a : atoms_) {
            out += "(" + a + ")\n";
        }
        return out;
    }

private:
    std::set<std::string> atoms_;
};

} // namespace lspkit
