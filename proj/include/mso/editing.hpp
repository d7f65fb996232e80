#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <mso/automaton.hpp>
#include <mso/direct_access.hpp>
#include <mso/errors.hpp>

namespace mso {

// A right-hand-side operand: 'a' (quoted, always one symbol) or a bare word
// that names either a database string or a previously defined variable --
// which of the two is resolved against the database during validation.
struct EditLiteral {
    bool quoted = false;
    std::string text;

    friend bool operator==(const EditLiteral&, const EditLiteral&) = default;
};

enum class EditOp { Concat, Split, Cut, Paste };

struct EditRule {
    EditOp op;
    std::vector<std::string> outs;
    std::vector<EditLiteral> args;
    std::vector<std::uint64_t> positions;
    int line = 0;
};

struct DbDecl {
    std::string name;
    std::vector<EditLiteral> tokens;
    int line = 0;
};

struct EditProgram {
    std::vector<DbDecl> db;
    std::vector<EditRule> rules;
    std::string output;
    int output_line = 0;
};

namespace detail {

inline EditLiteral parse_edit_literal(const FileToken& tok) {
    if (!tok.text.empty() && tok.text.front() == '\'') {
        if (tok.text.size() < 3 || tok.text.back() != '\'')
            throw ParseError("unterminated symbol literal " + tok.text, tok.line, tok.column);
        return EditLiteral{true, tok.text.substr(1, tok.text.size() - 2)};
    }
    return EditLiteral{false, tok.text};
}

inline std::uint64_t parse_position(const FileToken& tok) {
    std::uint64_t value = 0;
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("expected a position, got '" + tok.text + "'", tok.line, tok.column);
    return value;
}

inline void expect_equals(const std::vector<FileToken>& tokens, std::size_t at) {
    if (tokens[at].text != "=")
        throw ParseError("expected '=' after the output variables", tokens[at].line,
                         tokens[at].column);
}

}  // namespace detail

inline EditProgram parse_edit_program(std::string_view text) {
    EditProgram program;
    std::unordered_set<std::string> db_names;

    for (const auto& tokens : detail::tokenize_lines(text)) {
        const detail::FileToken& head = tokens[0];
        if (head.text == "db") {
            if (tokens.size() < 2)
                throw ParseError("expected: db NAME [STRING...]", head.line, head.column);
            DbDecl decl;
            decl.name = tokens[1].text;
            decl.line = head.line;
            if (!db_names.insert(decl.name).second)
                throw ParseError("string name '" + decl.name + "' declared twice",
                                 tokens[1].line, tokens[1].column);
            for (std::size_t i = 2; i < tokens.size(); ++i)
                decl.tokens.push_back(detail::parse_edit_literal(tokens[i]));
            program.db.push_back(std::move(decl));
        } else if (head.text == "concat") {
            if (tokens.size() != 5)
                throw ParseError("expected: concat OUT = L L'", head.line, head.column);
            detail::expect_equals(tokens, 2);
            EditRule rule{EditOp::Concat,
                          {tokens[1].text},
                          {detail::parse_edit_literal(tokens[3]),
                           detail::parse_edit_literal(tokens[4])},
                          {},
                          head.line};
            program.rules.push_back(std::move(rule));
        } else if (head.text == "split") {
            if (tokens.size() != 6)
                throw ParseError("expected: split OUT1 OUT2 = L I", head.line, head.column);
            detail::expect_equals(tokens, 3);
            EditRule rule{EditOp::Split,
                          {tokens[1].text, tokens[2].text},
                          {detail::parse_edit_literal(tokens[4])},
                          {detail::parse_position(tokens[5])},
                          head.line};
            program.rules.push_back(std::move(rule));
        } else if (head.text == "cut") {
            if (tokens.size() != 7)
                throw ParseError("expected: cut OUT1 OUT2 = L I J", head.line, head.column);
            detail::expect_equals(tokens, 3);
            EditRule rule{EditOp::Cut,
                          {tokens[1].text, tokens[2].text},
                          {detail::parse_edit_literal(tokens[4])},
                          {detail::parse_position(tokens[5]),
                           detail::parse_position(tokens[6])},
                          head.line};
            program.rules.push_back(std::move(rule));
        } else if (head.text == "paste") {
            if (tokens.size() != 6)
                throw ParseError("expected: paste OUT = L L' I", head.line, head.column);
            detail::expect_equals(tokens, 2);
            EditRule rule{EditOp::Paste,
                          {tokens[1].text},
                          {detail::parse_edit_literal(tokens[3]),
                           detail::parse_edit_literal(tokens[4])},
                          {detail::parse_position(tokens[5])},
                          head.line};
            program.rules.push_back(std::move(rule));
        } else if (head.text == "output") {
            if (tokens.size() != 2)
                throw ParseError("expected: output VAR", head.line, head.column);
            if (!program.output.empty())
                throw ParseError("duplicate output directive", head.line, head.column);
            program.output = tokens[1].text;
            program.output_line = head.line;
        } else {
            throw ParseError("unknown directive '" + head.text + "'", head.line, head.column);
        }
    }

    if (program.output.empty())
        throw ParseError("missing output directive", 0, 0);
    return program;
}

// Named input strings, each preprocessed once into a product tree.  Bound to
// one automaton; letter matrices are shared across all strings and with any
// singleton trees built for symbol literals.
class StringsDB {
public:
    explicit StringsDB(std::shared_ptr<const VsetAutomaton> automaton)
        : automaton_(std::move(automaton)),
          letters_(static_cast<std::size_t>(automaton_->num_symbols())) {}

    static StringsDB from_program(std::shared_ptr<const VsetAutomaton> automaton,
                                  const EditProgram& program) {
        StringsDB db(std::move(automaton));
        for (const DbDecl& decl : program.db)
            db.add(decl.name, db.resolve_tokens(decl));
        return db;
    }

    const VsetAutomaton& automaton() const { return *automaton_; }
    const std::shared_ptr<const VsetAutomaton>& automaton_ptr() const { return automaton_; }

    MatrixTree make_ops(TreeStats* stats = nullptr) const {
        return MatrixTree(MatrixMonoid{automaton_->num_states()}, stats);
    }

    void add(const std::string& name, const std::vector<SymbolId>& symbols) {
        if (entries_.count(name))
            throw ValidationError("string name '" + name + "' declared twice");
        std::vector<PosLabel> labels;
        labels.reserve(symbols.size());
        for (SymbolId s : symbols)
            labels.push_back(PosLabel{s, letter_handle(s)});
        Entry entry{symbols, make_ops().init(labels)};
        entries_.emplace(name, std::move(entry));
    }

    bool contains(const std::string& name) const { return entries_.count(name) != 0; }

    const MatrixTree::Tree& tree(const std::string& name) const { return entries_.at(name).tree; }

    const std::vector<SymbolId>& symbols(const std::string& name) const {
        return entries_.at(name).symbols;
    }

    DAIndex index(const std::string& name) const { return DAIndex{automaton_, tree(name)}; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& [name, entry] : entries_)
            out.push_back(name);
        return out;
    }

    const std::shared_ptr<const CountMatrix>& letter_handle(SymbolId s) const {
        if (s < 0 || s >= automaton_->num_symbols())
            throw std::invalid_argument("letter_handle: symbol id out of range");
        auto& handle = letters_[static_cast<std::size_t>(s)];
        if (!handle)
            handle = std::make_shared<CountMatrix>(letter_matrix(*automaton_, s));
        return handle;
    }

private:
    struct Entry {
        std::vector<SymbolId> symbols;
        MatrixTree::Tree tree;
    };

    std::vector<SymbolId> resolve_tokens(const DbDecl& decl) const {
        std::vector<SymbolId> out;
        auto resolve_one = [&](const std::string& text) {
            std::optional<SymbolId> s = automaton_->find_symbol(text);
            if (!s)
                throw ValidationError("line " + std::to_string(decl.line) + ": db '" +
                                      decl.name + "': unknown symbol '" + text + "'");
            out.push_back(*s);
        };
        for (const EditLiteral& tok : decl.tokens) {
            if (tok.quoted)
                resolve_one(tok.text);
            else
                for (char c : tok.text)
                    resolve_one(std::string(1, c));
        }
        return out;
    }

    std::shared_ptr<const VsetAutomaton> automaton_;
    std::map<std::string, Entry> entries_;
    mutable std::vector<std::shared_ptr<const CountMatrix>> letters_;
};

// Static checks per the program definition: names and variables are linear on
// right-hand sides, variables are defined before use and never redefined, the
// output is a rule-defined variable, and cut ranges are non-empty.  Position
// bounds depend on evaluated lengths and stay runtime checks.
inline std::vector<std::string> validate_program(const EditProgram& program,
                                                 const StringsDB& db) {
    std::vector<std::string> problems;
    std::unordered_set<std::string> defined;
    std::unordered_set<std::string> used_names;
    std::unordered_set<std::string> used_vars;

    auto report = [&](int line, std::string message) {
        problems.push_back("line " + std::to_string(line) + ": " + std::move(message));
    };

    for (const EditRule& rule : program.rules) {
        for (const EditLiteral& arg : rule.args) {
            if (arg.quoted) {
                if (!db.automaton().find_symbol(arg.text))
                    report(rule.line, "symbol '" + arg.text + "' is not in the alphabet");
            } else if (db.contains(arg.text)) {
                if (!used_names.insert(arg.text).second)
                    report(rule.line, "string name '" + arg.text + "' used twice");
            } else {
                if (!defined.count(arg.text))
                    report(rule.line, "variable '" + arg.text + "' used before it is defined");
                else if (!used_vars.insert(arg.text).second)
                    report(rule.line, "variable '" + arg.text + "' used twice");
            }
        }
        for (const std::string& out : rule.outs) {
            if (db.contains(out))
                report(rule.line, "output variable '" + out + "' collides with a string name");
            else if (!defined.insert(out).second)
                report(rule.line, "variable '" + out + "' defined twice");
        }
        if (rule.op == EditOp::Cut) {
            if (rule.positions[0] == 0)
                report(rule.line, "cut positions are 1-based");
            else if (rule.positions[0] > rule.positions[1])
                report(rule.line, "cut range is empty (i > j)");
        }
    }

    if (db.contains(program.output))
        report(program.output_line, "output must be a variable, not a string name");
    else if (!defined.count(program.output))
        report(program.output_line, "output variable '" + program.output + "' is never defined");
    return problems;
}

// One tree operation inside a rule: concat and split count as one step each,
// cut and paste expand to three.
struct EditStepStats {
    std::size_t rule_index = 0;
    std::uint64_t node_constructions = 0;
    std::uint64_t multiplications = 0;
};

struct EditStats {
    std::vector<EditStepStats> steps;
};

inline DAIndex apply_program(const EditProgram& program, const StringsDB& db,
                             EditStats* stats = nullptr) {
    std::vector<std::string> problems = validate_program(program, db);
    if (!problems.empty()) {
        std::string joined;
        for (const std::string& p : problems) {
            if (!joined.empty())
                joined += "; ";
            joined += p;
        }
        throw ValidationError(joined);
    }

    TreeStats tree_stats;
    MatrixTree ops = db.make_ops(&tree_stats);
    std::unordered_map<std::string, MatrixTree::Tree> env;

    auto resolve = [&](const EditLiteral& lit) -> MatrixTree::Tree {
        if (lit.quoted) {
            SymbolId s = *db.automaton().find_symbol(lit.text);
            return ops.leaf(PosLabel{s, db.letter_handle(s)});
        }
        if (db.contains(lit.text))
            return db.tree(lit.text);
        return env.at(lit.text);
    };

    for (std::size_t r = 0; r < program.rules.size(); ++r) {
        const EditRule& rule = program.rules[r];
        auto step = [&](auto&& fn) {
            std::uint64_t nodes_before = tree_stats.node_constructions;
            std::uint64_t mults_before = tree_stats.multiplications;
            fn();
            if (stats)
                stats->steps.push_back(EditStepStats{
                    r, tree_stats.node_constructions - nodes_before,
                    tree_stats.multiplications - mults_before});
        };
        auto check_bound = [&](std::uint64_t pos, std::uint64_t length, const char* what) {
            if (pos > length)
                throw EditError(std::string(what) + " position " + std::to_string(pos) +
                                    " exceeds length " + std::to_string(length),
                                r);
        };

        switch (rule.op) {
            case EditOp::Concat: {
                MatrixTree::Tree result;
                step([&] { result = ops.concat(resolve(rule.args[0]), resolve(rule.args[1])); });
                env[rule.outs[0]] = std::move(result);
                break;
            }
            case EditOp::Split: {
                MatrixTree::Tree prefix;
                MatrixTree::Tree suffix;
                step([&] {
                    MatrixTree::Tree t = resolve(rule.args[0]);
                    check_bound(rule.positions[0], MatrixTree::size(t), "split");
                    std::tie(prefix, suffix) =
                        ops.split_inclusive(t, static_cast<std::size_t>(rule.positions[0]));
                });
                env[rule.outs[0]] = std::move(prefix);
                env[rule.outs[1]] = std::move(suffix);
                break;
            }
            case EditOp::Cut: {
                std::uint64_t i = rule.positions[0];
                std::uint64_t j = rule.positions[1];
                MatrixTree::Tree upto_j;
                MatrixTree::Tree after_j;
                step([&] {
                    MatrixTree::Tree t = resolve(rule.args[0]);
                    check_bound(j, MatrixTree::size(t), "cut");
                    std::tie(upto_j, after_j) =
                        ops.split_inclusive(t, static_cast<std::size_t>(j));
                });
                MatrixTree::Tree before_i;
                MatrixTree::Tree infix;
                step([&] {
                    std::tie(before_i, infix) =
                        ops.split_inclusive(upto_j, static_cast<std::size_t>(i - 1));
                });
                MatrixTree::Tree remainder;
                step([&] { remainder = ops.concat(before_i, after_j); });
                env[rule.outs[0]] = std::move(infix);
                env[rule.outs[1]] = std::move(remainder);
                break;
            }
            case EditOp::Paste: {
                std::uint64_t i = rule.positions[0];
                MatrixTree::Tree prefix;
                MatrixTree::Tree suffix;
                step([&] {
                    MatrixTree::Tree t = resolve(rule.args[0]);
                    check_bound(i, MatrixTree::size(t), "paste");
                    std::tie(prefix, suffix) =
                        ops.split_inclusive(t, static_cast<std::size_t>(i));
                });
                MatrixTree::Tree grown;
                step([&] { grown = ops.concat(prefix, resolve(rule.args[1])); });
                MatrixTree::Tree result;
                step([&] { result = ops.concat(grown, suffix); });
                env[rule.outs[0]] = std::move(result);
                break;
            }
        }
    }

    return DAIndex{db.automaton_ptr(), env.at(program.output)};
}

inline std::vector<SymbolId> materialize(const DAIndex& ix) {
    std::vector<SymbolId> out;
    out.reserve(ix.length());
    MatrixTree::for_each(ix.tree, [&](const PosLabel& label) { out.push_back(label.symbol); });
    return out;
}

inline std::string materialize_text(const DAIndex& ix) {
    std::string out;
    const std::vector<std::string>& names = ix.automaton->symbols();
    MatrixTree::for_each(ix.tree, [&](const PosLabel& label) {
        out += names[static_cast<std::size_t>(label.symbol)];
    });
    return out;
}

}  // namespace mso
