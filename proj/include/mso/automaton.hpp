#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <mso/errors.hpp>

namespace mso {

using StateId = std::int32_t;
using SymbolId = std::int32_t;
using VarId = std::int32_t;

// Variable sets are bitmasks over the declared variables, capped at 64.
using VarMask = std::uint64_t;

inline constexpr int kMaxVariables = 64;

inline constexpr VarMask var_bit(VarId v) { return VarMask{1} << v; }
inline constexpr bool mask_subset(VarMask sub, VarMask super) { return (sub & ~super) == 0; }

struct Transition {
    StateId src;
    SymbolId symbol;
    VarMask vars;
    StateId dst;

    friend bool operator==(const Transition&, const Transition&) = default;
};

// Partial assignment of variables to 1-based string positions; 0 means unbound.
class Mapping {
public:
    Mapping() = default;
    explicit Mapping(int num_vars) : pos_(static_cast<std::size_t>(num_vars), 0) {}

    int num_vars() const { return static_cast<int>(pos_.size()); }
    bool is_bound(VarId v) const { return pos_[static_cast<std::size_t>(v)] != 0; }
    std::uint32_t position(VarId v) const { return pos_[static_cast<std::size_t>(v)]; }
    void bind(VarId v, std::uint32_t position) { pos_[static_cast<std::size_t>(v)] = position; }

    VarMask domain() const {
        VarMask m = 0;
        for (VarId v = 0; v < num_vars(); ++v)
            if (pos_[static_cast<std::size_t>(v)] != 0)
                m |= var_bit(v);
        return m;
    }

    VarMask vars_at(std::uint32_t position) const {
        VarMask m = 0;
        for (VarId v = 0; v < num_vars(); ++v)
            if (pos_[static_cast<std::size_t>(v)] == position)
                m |= var_bit(v);
        return m;
    }

    friend bool operator==(const Mapping&, const Mapping&) = default;

private:
    std::vector<std::uint32_t> pos_;
};

// Total order on the variables; accesses and enumeration sort by its
// left-to-right extension.
struct VarOrder {
    std::vector<VarId> sequence;

    static VarOrder canonical(int num_vars) {
        VarOrder order;
        order.sequence.resize(static_cast<std::size_t>(num_vars));
        for (int v = 0; v < num_vars; ++v)
            order.sequence[static_cast<std::size_t>(v)] = v;
        return order;
    }
};

inline bool lex_less(const Mapping& a, const Mapping& b, const VarOrder& order) {
    for (VarId v : order.sequence) {
        std::uint32_t pa = a.position(v);
        std::uint32_t pb = b.position(v);
        if (pa != pb)
            return pa < pb;
    }
    return false;
}

// Mutable pre-validation form: what the file parser and the instance
// generator produce before trimming and the variable-set analysis run.
struct RawAutomaton {
    std::vector<std::string> symbols;
    std::vector<std::string> variables;
    std::vector<std::string> state_names;
    std::vector<bool> final_flags;
    std::optional<StateId> initial;
    std::vector<Transition> transitions;

    SymbolId add_symbol(std::string name) {
        symbols.push_back(std::move(name));
        return static_cast<SymbolId>(symbols.size() - 1);
    }

    VarId add_variable(std::string name) {
        variables.push_back(std::move(name));
        return static_cast<VarId>(variables.size() - 1);
    }

    StateId add_state(std::string name, bool is_initial = false, bool is_final = false) {
        state_names.push_back(std::move(name));
        final_flags.push_back(is_final);
        StateId id = static_cast<StateId>(state_names.size() - 1);
        if (is_initial)
            initial = id;
        return id;
    }

    void add_transition(StateId src, SymbolId symbol, VarMask vars, StateId dst) {
        transitions.push_back(Transition{src, symbol, vars, dst});
    }

    VarMask all_vars() const {
        return variables.empty() ? 0 : (~VarMask{0} >> (kMaxVariables - variables.size()));
    }
};

inline std::string format_var_set(const std::vector<std::string>& variables, VarMask mask) {
    std::string out = "{";
    bool first = true;
    for (std::size_t v = 0; v < variables.size(); ++v) {
        if (mask & var_bit(static_cast<VarId>(v))) {
            if (!first)
                out += ",";
            out += variables[v];
            first = false;
        }
    }
    out += "}";
    return out;
}

struct TrimOutcome {
    RawAutomaton automaton;
    std::vector<std::string> removed_states;
    bool empty = false;  // nothing useful survives: the language is empty
};

// Keeps exactly the states that lie on some path initial -> final, renumbering
// densely while preserving declaration order.
inline TrimOutcome trim(const RawAutomaton& a) {
    TrimOutcome out;
    std::size_t n = a.state_names.size();
    if (!a.initial.has_value() || n == 0) {
        out.empty = true;
        out.removed_states = a.state_names;
        return out;
    }

    std::vector<std::vector<StateId>> fwd(n), bwd(n);
    for (const Transition& t : a.transitions) {
        fwd[static_cast<std::size_t>(t.src)].push_back(t.dst);
        bwd[static_cast<std::size_t>(t.dst)].push_back(t.src);
    }

    auto reach = [n](const std::vector<std::vector<StateId>>& adj, std::vector<StateId> seeds) {
        std::vector<bool> seen(n, false);
        std::deque<StateId> queue;
        for (StateId s : seeds) {
            if (!seen[static_cast<std::size_t>(s)]) {
                seen[static_cast<std::size_t>(s)] = true;
                queue.push_back(s);
            }
        }
        while (!queue.empty()) {
            StateId s = queue.front();
            queue.pop_front();
            for (StateId next : adj[static_cast<std::size_t>(s)]) {
                if (!seen[static_cast<std::size_t>(next)]) {
                    seen[static_cast<std::size_t>(next)] = true;
                    queue.push_back(next);
                }
            }
        }
        return seen;
    };

    std::vector<StateId> final_seeds;
    for (std::size_t q = 0; q < n; ++q)
        if (a.final_flags[q])
            final_seeds.push_back(static_cast<StateId>(q));

    std::vector<bool> forward = reach(fwd, {*a.initial});
    std::vector<bool> backward = reach(bwd, final_seeds);

    std::vector<StateId> remap(n, -1);
    for (std::size_t q = 0; q < n; ++q) {
        if (forward[q] && backward[q]) {
            remap[q] = static_cast<StateId>(out.automaton.state_names.size());
            out.automaton.add_state(a.state_names[q], false, a.final_flags[q]);
        } else {
            out.removed_states.push_back(a.state_names[q]);
        }
    }

    if (remap[static_cast<std::size_t>(*a.initial)] < 0) {
        out.empty = true;
        out.removed_states = a.state_names;
        out.automaton = RawAutomaton{};
        return out;
    }

    out.automaton.symbols = a.symbols;
    out.automaton.variables = a.variables;
    out.automaton.initial = remap[static_cast<std::size_t>(*a.initial)];
    for (const Transition& t : a.transitions) {
        StateId src = remap[static_cast<std::size_t>(t.src)];
        StateId dst = remap[static_cast<std::size_t>(t.dst)];
        if (src >= 0 && dst >= 0)
            out.automaton.add_transition(src, t.symbol, t.vars, dst);
    }
    return out;
}

struct VarSetsOutcome {
    std::vector<VarMask> sets;
    std::string error;

    bool ok() const { return error.empty(); }
};

// Fixpoint of Lemma "every path to q binds the same variables".  Requires a
// trimmed automaton (every state reachable from the initial state); reports
// the first inconsistency it meets, naming the offending state or transition.
inline VarSetsOutcome compute_var_sets(const RawAutomaton& a) {
    VarSetsOutcome out;
    std::size_t n = a.state_names.size();
    out.sets.assign(n, 0);
    if (!a.initial.has_value()) {
        out.error = "no initial state";
        return out;
    }

    std::vector<std::vector<const Transition*>> fwd(n);
    for (const Transition& t : a.transitions)
        fwd[static_cast<std::size_t>(t.src)].push_back(&t);

    std::vector<bool> assigned(n, false);
    assigned[static_cast<std::size_t>(*a.initial)] = true;
    std::deque<StateId> queue{*a.initial};

    auto describe = [&](const Transition& t) {
        std::string vars = t.vars == 0 ? "-" : format_var_set(a.variables, t.vars);
        return a.state_names[static_cast<std::size_t>(t.src)] + " -" +
               a.symbols[static_cast<std::size_t>(t.symbol)] + "/" + vars + "-> " +
               a.state_names[static_cast<std::size_t>(t.dst)];
    };

    while (!queue.empty()) {
        StateId p = queue.front();
        queue.pop_front();
        VarMask base = out.sets[static_cast<std::size_t>(p)];
        for (const Transition* t : fwd[static_cast<std::size_t>(p)]) {
            if (t->vars & base) {
                out.error = "transition " + describe(*t) + ": " +
                            format_var_set(a.variables, t->vars & base) +
                            " is already bound on every path to " +
                            a.state_names[static_cast<std::size_t>(p)];
                return out;
            }
            VarMask candidate = base | t->vars;
            std::size_t q = static_cast<std::size_t>(t->dst);
            if (!assigned[q]) {
                assigned[q] = true;
                out.sets[q] = candidate;
                queue.push_back(t->dst);
            } else if (out.sets[q] != candidate) {
                out.error = "state " + a.state_names[q] + ": paths disagree on bound variables (" +
                            format_var_set(a.variables, out.sets[q]) + " vs " +
                            format_var_set(a.variables, candidate) + ")";
                return out;
            }
        }
    }

    VarMask full = a.all_vars();
    for (std::size_t q = 0; q < n; ++q) {
        if (a.final_flags[q] && out.sets[q] != full) {
            out.error = "final state " + a.state_names[q] + " is missing variables " +
                        format_var_set(a.variables, full & ~out.sets[q]);
            return out;
        }
    }
    return out;
}

class VsetAutomaton;
struct ValidationResult;
ValidationResult validate_automaton(const RawAutomaton& raw);

// Validated, trimmed, functional automaton.  Transitions are stored sorted by
// (source, symbol, target) with a per-(source, symbol) slice index.
class VsetAutomaton {
public:
    int num_states() const { return static_cast<int>(state_names_.size()); }
    int num_symbols() const { return static_cast<int>(symbols_.size()); }
    int num_vars() const { return static_cast<int>(variables_.size()); }

    const std::string& state_name(StateId q) const { return state_names_[static_cast<std::size_t>(q)]; }
    const std::string& symbol_name(SymbolId s) const { return symbols_[static_cast<std::size_t>(s)]; }
    const std::string& var_name(VarId v) const { return variables_[static_cast<std::size_t>(v)]; }
    const std::vector<std::string>& symbols() const { return symbols_; }
    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<std::string>& state_names() const { return state_names_; }

    std::optional<SymbolId> find_symbol(std::string_view name) const {
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i] == name)
                return static_cast<SymbolId>(i);
        return std::nullopt;
    }

    std::optional<VarId> find_variable(std::string_view name) const {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i] == name)
                return static_cast<VarId>(i);
        return std::nullopt;
    }

    StateId initial() const { return initial_; }
    bool is_final(StateId q) const { return final_flags_[static_cast<std::size_t>(q)]; }
    const std::vector<StateId>& finals() const { return finals_; }
    VarMask var_set(StateId q) const { return var_sets_[static_cast<std::size_t>(q)]; }
    VarMask all_vars() const { return full_mask_; }

    std::span<const Transition> transitions() const { return transitions_; }

    std::span<const Transition> transitions_from(StateId src, SymbolId symbol) const {
        std::size_t slot = static_cast<std::size_t>(src) * symbols_.size() +
                           static_cast<std::size_t>(symbol);
        return std::span<const Transition>(transitions_.data() + offsets_[slot],
                                           offsets_[slot + 1] - offsets_[slot]);
    }

    friend bool operator==(const VsetAutomaton& a, const VsetAutomaton& b) {
        return a.symbols_ == b.symbols_ && a.variables_ == b.variables_ &&
               a.state_names_ == b.state_names_ && a.final_flags_ == b.final_flags_ &&
               a.initial_ == b.initial_ && a.transitions_ == b.transitions_ &&
               a.var_sets_ == b.var_sets_;
    }

private:
    friend struct ValidationResult;
    friend ValidationResult validate_automaton(const RawAutomaton& raw);
    VsetAutomaton() = default;

    std::vector<std::string> symbols_;
    std::vector<std::string> variables_;
    std::vector<std::string> state_names_;
    std::vector<bool> final_flags_;
    std::vector<StateId> finals_;
    StateId initial_ = 0;
    std::vector<Transition> transitions_;
    std::vector<std::size_t> offsets_;
    std::vector<VarMask> var_sets_;
    VarMask full_mask_ = 0;
};

struct ValidationResult {
    VsetAutomaton automaton;
    std::vector<std::string> removed_states;  // trimmed away, original names
};

// Trim, run the variable-set analysis, and freeze the automaton.  Rejects
// automata whose language is empty and automata that are not functional.
inline ValidationResult validate_automaton(const RawAutomaton& raw) {
    if (raw.variables.size() > static_cast<std::size_t>(kMaxVariables))
        throw ValidationError("too many variables (limit " + std::to_string(kMaxVariables) + ")");
    if (!raw.initial.has_value())
        throw ValidationError("no initial state declared");

    VarMask full = raw.all_vars();
    for (const Transition& t : raw.transitions) {
        if (t.src < 0 || static_cast<std::size_t>(t.src) >= raw.state_names.size() ||
            t.dst < 0 || static_cast<std::size_t>(t.dst) >= raw.state_names.size() ||
            t.symbol < 0 || static_cast<std::size_t>(t.symbol) >= raw.symbols.size() ||
            !mask_subset(t.vars, full))
            throw ValidationError("transition references an undeclared state, symbol, or variable");
    }

    TrimOutcome trimmed = trim(raw);
    if (trimmed.empty)
        throw EmptyLanguageError(
            "the automaton accepts no string (no final state is reachable from the initial state)");

    const RawAutomaton& a = trimmed.automaton;

    std::vector<Transition> sorted = a.transitions;
    std::sort(sorted.begin(), sorted.end(), [](const Transition& x, const Transition& y) {
        return std::tie(x.src, x.symbol, x.dst, x.vars) < std::tie(y.src, y.symbol, y.dst, y.vars);
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const Transition& prev = sorted[i - 1];
        const Transition& cur = sorted[i];
        if (prev.src == cur.src && prev.symbol == cur.symbol && prev.dst == cur.dst)
            throw ValidationError(
                "two transitions share (" + a.state_names[static_cast<std::size_t>(cur.src)] +
                ", " + a.symbols[static_cast<std::size_t>(cur.symbol)] + ", " +
                a.state_names[static_cast<std::size_t>(cur.dst)] +
                "); a functional automaton allows at most one");
    }

    VarSetsOutcome var_sets = compute_var_sets(a);
    if (!var_sets.ok())
        throw ValidationError(var_sets.error);

    ValidationResult result;
    result.removed_states = std::move(trimmed.removed_states);
    VsetAutomaton& out = result.automaton;
    out.symbols_ = a.symbols;
    out.variables_ = a.variables;
    out.state_names_ = a.state_names;
    out.final_flags_ = a.final_flags;
    out.initial_ = *a.initial;
    out.transitions_ = std::move(sorted);
    out.var_sets_ = std::move(var_sets.sets);
    out.full_mask_ = full;
    for (std::size_t q = 0; q < out.state_names_.size(); ++q)
        if (out.final_flags_[q])
            out.finals_.push_back(static_cast<StateId>(q));

    std::size_t slots = out.state_names_.size() * out.symbols_.size();
    out.offsets_.assign(slots + 1, 0);
    for (const Transition& t : out.transitions_)
        ++out.offsets_[static_cast<std::size_t>(t.src) * out.symbols_.size() +
                       static_cast<std::size_t>(t.symbol) + 1];
    for (std::size_t i = 1; i <= slots; ++i)
        out.offsets_[i] += out.offsets_[i - 1];
    return result;
}

namespace detail {

struct FileToken {
    std::string text;
    int line;
    int column;
};

inline std::vector<std::vector<FileToken>> tokenize_lines(std::string_view text) {
    std::vector<std::vector<FileToken>> lines;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view line = text.substr(
            start, end == std::string_view::npos ? text.size() - start : end - start);
        ++line_no;

        if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);

        std::vector<FileToken> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
                ++i;
            if (i >= line.size())
                break;
            std::size_t tok_start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
                ++i;
            tokens.push_back(FileToken{std::string(line.substr(tok_start, i - tok_start)),
                                       line_no, static_cast<int>(tok_start) + 1});
        }
        if (!tokens.empty())
            lines.push_back(std::move(tokens));

        if (end == std::string_view::npos)
            break;
        start = end + 1;
    }
    return lines;
}

}  // namespace detail

// Reads the line-oriented automaton format:
//
//   alphabet a b
//   var x1
//   state q0 initial
//   state q3 final
//   trans q0 a x1,x2 q3
//
// '#' starts a comment; '-' is the empty variable set.  Declarations may
// appear in any order relative to the transitions that use them.
inline ValidationResult parse_automaton(std::string_view text) {
    RawAutomaton raw;
    std::unordered_map<std::string, SymbolId> symbol_ids;
    std::unordered_map<std::string, VarId> var_ids;
    std::unordered_map<std::string, StateId> state_ids;

    auto lines = detail::tokenize_lines(text);
    std::vector<const std::vector<detail::FileToken>*> transition_lines;

    for (const auto& tokens : lines) {
        const detail::FileToken& head = tokens[0];
        if (head.text == "alphabet") {
            if (tokens.size() < 2)
                throw ParseError("alphabet needs at least one symbol", head.line, head.column);
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                if (symbol_ids.count(tokens[i].text))
                    throw ParseError("duplicate symbol '" + tokens[i].text + "'", tokens[i].line,
                                     tokens[i].column);
                symbol_ids.emplace(tokens[i].text, raw.add_symbol(tokens[i].text));
            }
        } else if (head.text == "var") {
            if (tokens.size() < 2)
                throw ParseError("var needs a variable name", head.line, head.column);
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                if (var_ids.count(tokens[i].text))
                    throw ParseError("duplicate variable '" + tokens[i].text + "'", tokens[i].line,
                                     tokens[i].column);
                if (raw.variables.size() >= static_cast<std::size_t>(kMaxVariables))
                    throw ParseError("too many variables (limit 64)", tokens[i].line,
                                     tokens[i].column);
                var_ids.emplace(tokens[i].text, raw.add_variable(tokens[i].text));
            }
        } else if (head.text == "state") {
            if (tokens.size() < 2)
                throw ParseError("state needs a name", head.line, head.column);
            const detail::FileToken& name = tokens[1];
            if (state_ids.count(name.text))
                throw ParseError("duplicate state '" + name.text + "'", name.line, name.column);
            bool is_initial = false;
            bool is_final = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                if (tokens[i].text == "initial") {
                    if (raw.initial.has_value())
                        throw ParseError("initial state already declared ('" +
                                             raw.state_names[static_cast<std::size_t>(*raw.initial)] +
                                             "')",
                                         tokens[i].line, tokens[i].column);
                    is_initial = true;
                } else if (tokens[i].text == "final") {
                    is_final = true;
                } else {
                    throw ParseError("unknown state flag '" + tokens[i].text + "'", tokens[i].line,
                                     tokens[i].column);
                }
            }
            state_ids.emplace(name.text, raw.add_state(name.text, is_initial, is_final));
        } else if (head.text == "trans") {
            if (tokens.size() != 5)
                throw ParseError("expected: trans SRC SYMBOL VARS DST", head.line, head.column);
            transition_lines.push_back(&tokens);
        } else {
            throw ParseError("unknown directive '" + head.text + "'", head.line, head.column);
        }
    }

    for (const auto* tokens_ptr : transition_lines) {
        const auto& tokens = *tokens_ptr;
        auto state_of = [&](const detail::FileToken& tok) {
            auto it = state_ids.find(tok.text);
            if (it == state_ids.end())
                throw ParseError("unknown state '" + tok.text + "'", tok.line, tok.column);
            return it->second;
        };
        StateId src = state_of(tokens[1]);
        StateId dst = state_of(tokens[4]);

        auto sym_it = symbol_ids.find(tokens[2].text);
        if (sym_it == symbol_ids.end())
            throw ParseError("unknown symbol '" + tokens[2].text + "'", tokens[2].line,
                             tokens[2].column);

        VarMask mask = 0;
        const detail::FileToken& vars_tok = tokens[3];
        if (vars_tok.text != "-") {
            std::size_t piece_start = 0;
            const std::string& spec = vars_tok.text;
            while (piece_start <= spec.size()) {
                std::size_t comma = spec.find(',', piece_start);
                std::string piece = spec.substr(
                    piece_start, comma == std::string::npos ? spec.size() - piece_start
                                                            : comma - piece_start);
                int piece_col = vars_tok.column + static_cast<int>(piece_start);
                if (piece.empty())
                    throw ParseError("empty variable name in set", vars_tok.line, piece_col);
                auto var_it = var_ids.find(piece);
                if (var_it == var_ids.end())
                    throw ParseError("unknown variable '" + piece + "'", vars_tok.line, piece_col);
                if (mask & var_bit(var_it->second))
                    throw ParseError("variable '" + piece + "' listed twice", vars_tok.line,
                                     piece_col);
                mask |= var_bit(var_it->second);
                if (comma == std::string::npos)
                    break;
                piece_start = comma + 1;
            }
        }
        raw.add_transition(src, sym_it->second, mask, dst);
    }

    return validate_automaton(raw);
}

// Emits the same line-oriented format parse_automaton reads; parsing the
// result reproduces the automaton exactly.
inline std::string serialize(const VsetAutomaton& a) {
    std::ostringstream out;
    out << "alphabet";
    for (const std::string& s : a.symbols())
        out << ' ' << s;
    out << '\n';
    for (const std::string& v : a.variables())
        out << "var " << v << '\n';
    for (StateId q = 0; q < a.num_states(); ++q) {
        out << "state " << a.state_name(q);
        if (q == a.initial())
            out << " initial";
        if (a.is_final(q))
            out << " final";
        out << '\n';
    }
    for (const Transition& t : a.transitions()) {
        out << "trans " << a.state_name(t.src) << ' ' << a.symbol_name(t.symbol) << ' ';
        if (t.vars == 0) {
            out << '-';
        } else {
            bool first = true;
            for (VarId v = 0; v < a.num_vars(); ++v) {
                if (t.vars & var_bit(v)) {
                    if (!first)
                        out << ',';
                    out << a.var_name(v);
                    first = false;
                }
            }
        }
        out << ' ' << a.state_name(t.dst) << '\n';
    }
    return out.str();
}

struct AmbiguityOutcome {
    bool unambiguous = true;
    std::vector<SymbolId> witness;  // shortest string with two runs yielding one output
};

// Pair construction: walk two copies in lockstep, restricted to transition
// pairs with equal symbol and equal variable set (two runs can only produce
// the same output if they bind the same variables at every position).  The
// flag records whether the runs have diverged; reaching a final pair with the
// flag set exhibits two distinct accepting runs for one output.
inline AmbiguityOutcome check_unambiguous(const VsetAutomaton& a) {
    std::size_t n = static_cast<std::size_t>(a.num_states());
    auto encode = [n](StateId p, StateId q, bool flag) {
        return (static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * 2 +
               (flag ? 1 : 0);
    };

    std::vector<bool> seen(n * n * 2, false);
    std::vector<std::size_t> parent(n * n * 2, SIZE_MAX);
    std::vector<SymbolId> via(n * n * 2, -1);
    std::deque<std::size_t> queue;

    std::size_t start = encode(a.initial(), a.initial(), false);
    seen[start] = true;
    queue.push_back(start);

    while (!queue.empty()) {
        std::size_t id = queue.front();
        queue.pop_front();
        bool flag = (id & 1) != 0;
        StateId q = static_cast<StateId>((id >> 1) % n);
        StateId p = static_cast<StateId>((id >> 1) / n);

        for (SymbolId s = 0; s < a.num_symbols(); ++s) {
            for (const Transition& t1 : a.transitions_from(p, s)) {
                for (const Transition& t2 : a.transitions_from(q, s)) {
                    if (t1.vars != t2.vars)
                        continue;
                    bool next_flag = flag || !(t1 == t2);
                    std::size_t next = encode(t1.dst, t2.dst, next_flag);
                    if (seen[next])
                        continue;
                    seen[next] = true;
                    parent[next] = id;
                    via[next] = s;
                    if (next_flag && a.is_final(t1.dst) && a.is_final(t2.dst)) {
                        AmbiguityOutcome out;
                        out.unambiguous = false;
                        for (std::size_t cur = next; cur != start; cur = parent[cur])
                            out.witness.push_back(via[cur]);
                        std::reverse(out.witness.begin(), out.witness.end());
                        return out;
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    return AmbiguityOutcome{};
}

// Parses "x2,x1" against the automaton's declared variables; the order must
// name every variable exactly once.
inline VarOrder parse_var_order(const VsetAutomaton& a, std::string_view csv) {
    VarOrder order;
    VarMask listed = 0;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        std::string_view piece = csv.substr(
            start, comma == std::string_view::npos ? csv.size() - start : comma - start);
        if (piece.empty())
            throw ValidationError("empty variable name in order");
        auto v = a.find_variable(piece);
        if (!v.has_value())
            throw ValidationError("unknown variable '" + std::string(piece) + "' in order");
        if (listed & var_bit(*v))
            throw ValidationError("variable '" + std::string(piece) + "' listed twice in order");
        listed |= var_bit(*v);
        order.sequence.push_back(*v);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    if (listed != a.all_vars())
        throw ValidationError("order must list every variable exactly once (missing " +
                              format_var_set(a.variables(), a.all_vars() & ~listed) + ")");
    return order;
}

inline void require_valid_order(const VsetAutomaton& a, const VarOrder& order) {
    VarMask listed = 0;
    for (VarId v : order.sequence) {
        if (v < 0 || v >= a.num_vars() || (listed & var_bit(v)))
            throw ValidationError("variable order is not a permutation of the variables");
        listed |= var_bit(v);
    }
    if (listed != a.all_vars())
        throw ValidationError("variable order is not a permutation of the variables");
}

inline std::string format_mapping(const VsetAutomaton& a, const Mapping& m,
                                  const VarOrder& order) {
    std::string out;
    for (VarId v : order.sequence) {
        if (!out.empty())
            out += ' ';
        out += a.var_name(v);
        out += '=';
        out += std::to_string(m.position(v));
    }
    return out;
}

// Splits input text into symbol tokens: whitespace-separated words, or every
// non-whitespace character when chars mode is active.
inline std::vector<std::string> split_input_text(std::string_view text, bool chars) {
    std::vector<std::string> tokens;
    if (chars) {
        for (char c : text)
            if (c != ' ' && c != '\t' && c != '\n' && c != '\r')
                tokens.emplace_back(1, c);
        return tokens;
    }
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) != 0))
            ++i;
        std::size_t start = i;
        while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) == 0))
            ++i;
        if (i > start)
            tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

inline std::vector<SymbolId> resolve_input(const VsetAutomaton& a,
                                           std::span<const std::string> tokens) {
    std::vector<SymbolId> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto s = a.find_symbol(tokens[i]);
        if (!s.has_value())
            throw ValidationError("unknown symbol '" + tokens[i] + "' at input position " +
                                  std::to_string(i + 1));
        out.push_back(*s);
    }
    return out;
}

}  // namespace mso
