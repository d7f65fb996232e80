#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <mso/automaton.hpp>
#include <mso/errors.hpp>
#include <mso/nat.hpp>

namespace mso {

// Guard rails for the exhaustive routines below.  They walk every run, so
// they are only meant for small instances; the caps make a runaway call fail
// fast instead of eating the machine.
struct OracleBudget {
    std::size_t max_states_for_long = 8;
    std::size_t max_length_when_large = 12;
    std::uint64_t max_steps = 50'000'000;
};

namespace detail {

struct RunSearch {
    const VsetAutomaton& a;
    std::span<const SymbolId> input;
    const OracleBudget& budget;
    std::uint64_t steps = 0;
    std::vector<VarMask> sets{};
    std::vector<Mapping> found{};

    void walk(StateId state, std::size_t pos, VarMask bound) {
        if (++steps > budget.max_steps)
            throw BudgetError("output enumeration exceeded its step budget");
        if (pos == input.size()) {
            if (a.is_final(state) && bound == a.all_vars())
                found.push_back(mapping_from_sets());
            return;
        }
        for (const Transition& t : a.transitions_from(state, input[pos])) {
            if ((t.vars & bound) != 0)
                continue;  // a variable may be placed only once per run
            sets.push_back(t.vars);
            walk(t.dst, pos + 1, bound | t.vars);
            sets.pop_back();
        }
    }

    Mapping mapping_from_sets() const {
        Mapping m(static_cast<int>(a.num_vars()));
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (VarId x = 0; x < a.num_vars(); ++x)
                if (sets[i] & var_bit(x))
                    m.bind(x, static_cast<std::uint32_t>(i + 1));
        return m;
    }
};

}  // namespace detail

// Every output produced by a valid accepting run, in run-discovery order.
// Duplicates appear exactly when the automaton is ambiguous on this input.
inline std::vector<Mapping> enumerate_outputs(const VsetAutomaton& a,
                                              std::span<const SymbolId> input,
                                              const OracleBudget& budget = {}) {
    if (static_cast<std::size_t>(a.num_states()) > budget.max_states_for_long &&
        input.size() > budget.max_length_when_large)
        throw BudgetError("input too long for exhaustive enumeration on an automaton this size");
    detail::RunSearch search{a, input, budget};
    search.walk(a.initial(), 0, 0);
    return std::move(search.found);
}

// Outputs sorted by the given variable order.  Refuses ambiguous inputs: a
// duplicate output means two distinct accepting runs agree, which breaks the
// one-run-per-output assumption every counting routine relies on.
inline std::vector<Mapping> sorted_outputs(const VsetAutomaton& a,
                                           std::span<const SymbolId> input,
                                           const VarOrder& order,
                                           const OracleBudget& budget = {}) {
    require_valid_order(a, order);
    std::vector<Mapping> out = enumerate_outputs(a, input, budget);
    std::sort(out.begin(), out.end(),
              [&](const Mapping& x, const Mapping& y) { return lex_less(x, y, order); });
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] == out[i - 1])
            throw ValidationError("ambiguity detected: two accepting runs produce " +
                                  format_mapping(a, out[i], order));
    return out;
}

// Reference implementation of the constrained count: enumerate everything,
// then keep the outputs that agree with tau on the order prefix, with the
// last bound variable relaxed from equality to <=.
inline Nat constrained_count_oracle(const VsetAutomaton& a,
                                    std::span<const SymbolId> input, const Mapping& tau,
                                    const VarOrder& order,
                                    const OracleBudget& budget = {}) {
    require_valid_order(a, order);
    std::size_t k = 0;
    while (k < order.sequence.size() && tau.is_bound(order.sequence[k]))
        ++k;
    if (tau.domain() != [&] {
            VarMask m = 0;
            for (std::size_t i = 0; i < k; ++i)
                m |= var_bit(order.sequence[i]);
            return m;
        }())
        throw std::invalid_argument("constrained_count_oracle: tau must bind a prefix of the order");

    std::vector<Mapping> all = enumerate_outputs(a, input, budget);
    std::uint64_t matched = 0;
    for (const Mapping& mu : all) {
        bool ok = true;
        for (std::size_t i = 0; ok && i + 1 < k; ++i) {
            VarId x = order.sequence[i];
            ok = mu.position(x) == tau.position(x);
        }
        if (ok && k > 0) {
            VarId last = order.sequence[k - 1];
            ok = mu.position(last) <= tau.position(last);
        }
        if (ok)
            ++matched;
    }
    return Nat(matched);
}

// Number of runs (valid or not) from `from` to `to` reading the whole input,
// by explicit path search.  Small inputs only.
inline Nat count_partial_runs(const VsetAutomaton& a, StateId from,
                              std::span<const SymbolId> input, StateId to) {
    std::uint64_t runs = 0;
    std::vector<std::pair<StateId, std::size_t>> stack{{from, 0}};
    while (!stack.empty()) {
        auto [state, pos] = stack.back();
        stack.pop_back();
        if (pos == input.size()) {
            if (state == to)
                ++runs;
            continue;
        }
        for (const Transition& t : a.transitions_from(state, input[pos]))
            stack.emplace_back(t.dst, pos + 1);
    }
    return Nat(runs);
}

// --- seeded instance generator ----------------------------------------------

struct GeneratorConfig {
    int max_states = 6;
    int max_vars = 3;
    int num_symbols = 2;
};

namespace detail {

inline std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
    return n == 0 ? 0 : rng() % n;
}

}  // namespace detail

// Random functional automata, built so that every state carries a fixed
// variable set and every transition tops up exactly the difference.  That
// construction can never fail validation for variable-set reasons; rejection
// only happens for empty languages and for ambiguity, so retrying a few
// times always lands on a usable instance.
inline VsetAutomaton random_unambiguous_automaton(std::uint64_t seed,
                                                  const GeneratorConfig& cfg = {}) {
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 10'000; ++attempt) {
        int nq = 1 + static_cast<int>(detail::rand_below(rng, static_cast<std::uint64_t>(cfg.max_states)));
        int nv = static_cast<int>(detail::rand_below(rng, static_cast<std::uint64_t>(cfg.max_vars) + 1));
        if (nv > 0 && nq < 2)
            nq = 2;
        VarMask full = nv == 64 ? ~VarMask{0} : (var_bit(nv) - 1);

        RawAutomaton raw;
        for (int s = 0; s < cfg.num_symbols; ++s)
            raw.add_symbol(std::string(1, static_cast<char>('a' + s)));
        for (VarId x = 0; x < nv; ++x)
            raw.add_variable("x" + std::to_string(x + 1));
        std::vector<VarMask> mask(static_cast<std::size_t>(nq));
        mask[0] = 0;
        for (int q = 1; q < nq; ++q)
            mask[static_cast<std::size_t>(q)] = detail::rand_below(rng, full + 1);
        std::vector<int> complete;
        for (int q = 0; q < nq; ++q)
            if (mask[q] == full)
                complete.push_back(q);
        if (complete.empty()) {
            mask[nq - 1] = full;
            complete.push_back(nq - 1);
        }
        std::vector<bool> is_final(static_cast<std::size_t>(nq), false);
        for (int q : complete)
            is_final[q] = detail::rand_below(rng, 2) == 0;
        if (std::none_of(is_final.begin(), is_final.end(), [](bool b) { return b; }))
            is_final[static_cast<std::size_t>(complete[detail::rand_below(rng, complete.size())])] = true;
        for (int q = 0; q < nq; ++q)
            raw.add_state("s" + std::to_string(q), q == 0, is_final[q]);

        std::vector<std::vector<bool>> used(
            static_cast<std::size_t>(nq) * cfg.num_symbols,
            std::vector<bool>(static_cast<std::size_t>(nq), false));
        int tries = nq * nq * cfg.num_symbols;
        for (int t = 0; t < tries; ++t) {
            int p = static_cast<int>(detail::rand_below(rng, static_cast<std::uint64_t>(nq)));
            int q = static_cast<int>(detail::rand_below(rng, static_cast<std::uint64_t>(nq)));
            SymbolId s = static_cast<SymbolId>(detail::rand_below(rng, static_cast<std::uint64_t>(cfg.num_symbols)));
            if (!mask_subset(mask[p], mask[q]))
                continue;
            auto& slot = used[static_cast<std::size_t>(p) * cfg.num_symbols + s];
            if (slot[static_cast<std::size_t>(q)])
                continue;
            slot[static_cast<std::size_t>(q)] = true;
            raw.add_transition(p, s, mask[q] & ~mask[p], q);
        }

        try {
            ValidationResult result = validate_automaton(raw);
            if (check_unambiguous(result.automaton).unambiguous)
                return std::move(result.automaton);
        } catch (const ValidationError&) {
        }
    }
    throw std::runtime_error("random_unambiguous_automaton: no instance found (seed exhausted retries)");
}

}  // namespace mso
