#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <mso/automaton.hpp>
#include <mso/editing.hpp>

// Flat-string semantics of editing programs, plus a generator of random valid
// programs.  Both operate on plain symbol vectors so they share nothing with
// the tree implementation they check.
namespace refedit {

using Flat = std::vector<mso::SymbolId>;

inline Flat ref_apply(const mso::EditProgram& program, const mso::VsetAutomaton& a,
                      const std::map<std::string, Flat>& db) {
    std::map<std::string, Flat> env;
    auto value = [&](const mso::EditLiteral& lit) -> Flat {
        if (lit.quoted)
            return {*a.find_symbol(lit.text)};
        auto it = db.find(lit.text);
        if (it != db.end())
            return it->second;
        return env.at(lit.text);
    };

    for (const mso::EditRule& rule : program.rules) {
        switch (rule.op) {
            case mso::EditOp::Concat: {
                Flat out = value(rule.args[0]);
                Flat tail = value(rule.args[1]);
                out.insert(out.end(), tail.begin(), tail.end());
                env[rule.outs[0]] = std::move(out);
                break;
            }
            case mso::EditOp::Split: {
                Flat s = value(rule.args[0]);
                auto i = static_cast<std::ptrdiff_t>(rule.positions[0]);
                env[rule.outs[0]] = Flat(s.begin(), s.begin() + i);
                env[rule.outs[1]] = Flat(s.begin() + i, s.end());
                break;
            }
            case mso::EditOp::Cut: {
                Flat s = value(rule.args[0]);
                auto i = static_cast<std::ptrdiff_t>(rule.positions[0]);
                auto j = static_cast<std::ptrdiff_t>(rule.positions[1]);
                env[rule.outs[0]] = Flat(s.begin() + i - 1, s.begin() + j);
                Flat remainder(s.begin(), s.begin() + i - 1);
                remainder.insert(remainder.end(), s.begin() + j, s.end());
                env[rule.outs[1]] = std::move(remainder);
                break;
            }
            case mso::EditOp::Paste: {
                Flat s = value(rule.args[0]);
                Flat mid = value(rule.args[1]);
                auto i = static_cast<std::ptrdiff_t>(rule.positions[0]);
                Flat out(s.begin(), s.begin() + i);
                out.insert(out.end(), mid.begin(), mid.end());
                out.insert(out.end(), s.begin() + i, s.end());
                env[rule.outs[0]] = std::move(out);
                break;
            }
        }
    }
    return env.at(program.output);
}

// Emits program text that always parses, validates, and runs: operands are
// consumed linearly, every position is within the operand's tracked length,
// and the output is one of the defined variables.
inline std::string random_program_text(std::mt19937_64& rng,
                                       const std::vector<std::string>& symbols,
                                       int num_strings, int max_rules, int max_len) {
    auto pick = [&](std::uint64_t n) { return rng() % n; };

    struct Item {
        std::string token;
        std::uint64_t len;
    };
    std::vector<Item> live;
    std::string text;

    for (int i = 1; i <= num_strings; ++i) {
        std::string name = "s" + std::to_string(i);
        std::uint64_t len = pick(static_cast<std::uint64_t>(max_len) + 1);
        text += "db " + name;
        for (std::uint64_t k = 0; k < len; ++k) {
            const std::string& sym = symbols[pick(symbols.size())];
            if (sym.size() > 1 || pick(8) == 0)
                text += " '" + sym + "'";
            else
                text += (k == 0 || text.back() == '\'') ? " " + sym : sym;
        }
        text += '\n';
        live.push_back({name, len});
    }

    int var_counter = 0;
    std::vector<std::string> defined;
    auto fresh = [&] {
        std::string name = "S" + std::to_string(++var_counter);
        defined.push_back(name);
        return name;
    };
    auto take = [&](std::size_t idx) {
        Item item = live[idx];
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
        return item;
    };
    auto second_operand = [&]() -> Item {
        if (live.empty() || pick(4) == 0) {
            const std::string& sym = symbols[pick(symbols.size())];
            return Item{"'" + sym + "'", 1};
        }
        return take(pick(live.size()));
    };

    int rules = 1 + static_cast<int>(pick(static_cast<std::uint64_t>(max_rules)));
    for (int r = 0; r < rules && !live.empty(); ++r) {
        int op = static_cast<int>(pick(4));
        Item a = take(pick(live.size()));
        if (op == 2 && a.len == 0)
            op = 1;

        if (op == 0) {
            Item b = second_operand();
            std::string out = fresh();
            text += "concat " + out + " = " + a.token + " " + b.token + "\n";
            live.push_back({out, a.len + b.len});
        } else if (op == 1) {
            std::uint64_t i = pick(a.len + 1);
            std::string o1 = fresh();
            std::string o2 = fresh();
            text += "split " + o1 + " " + o2 + " = " + a.token + " " + std::to_string(i) + "\n";
            live.push_back({o1, i});
            live.push_back({o2, a.len - i});
        } else if (op == 2) {
            std::uint64_t i = 1 + pick(a.len);
            std::uint64_t j = i + pick(a.len - i + 1);
            std::string o1 = fresh();
            std::string o2 = fresh();
            text += "cut " + o1 + " " + o2 + " = " + a.token + " " + std::to_string(i) + " " +
                    std::to_string(j) + "\n";
            live.push_back({o1, j - i + 1});
            live.push_back({o2, a.len - (j - i + 1)});
        } else {
            Item b = second_operand();
            std::uint64_t i = pick(a.len + 1);
            std::string out = fresh();
            text += "paste " + out + " = " + a.token + " " + b.token + " " +
                    std::to_string(i) + "\n";
            live.push_back({out, a.len + b.len});
        }
    }

    text += "output " + defined[pick(defined.size())] + "\n";
    return text;
}

}  // namespace refedit
