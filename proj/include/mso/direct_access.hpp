#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <mso/automaton.hpp>
#include <mso/avl_product.hpp>
#include <mso/errors.hpp>
#include <mso/matrix.hpp>
#include <mso/nat.hpp>

namespace mso {

// One input position: its symbol plus a handle to the counting matrix in
// effect there.  Freshly preprocessed positions share one matrix per distinct
// symbol; pinning a position swaps in a private constrained matrix.
struct PosLabel {
    SymbolId symbol = 0;
    std::shared_ptr<const CountMatrix> matrix;
};

struct MatrixMonoid {
    int dim = 0;

    using Element = CountMatrix;

    Element identity_element() const { return CountMatrix::identity(dim); }
    Element multiply(const Element& a, const Element& b) const { return mat_mul(a, b); }
    std::shared_ptr<const Element> measure(const PosLabel& label) const { return label.matrix; }
};

using MatrixTree = AvlProduct<PosLabel, MatrixMonoid>;

// Immutable index over one input string: the automaton plus a product tree
// whose root product is the counting matrix of the whole string.  Accesses
// never modify it; every mutation happens on invocation-local roots.
struct DAIndex {
    std::shared_ptr<const VsetAutomaton> automaton;
    MatrixTree::Tree tree;

    std::size_t length() const { return MatrixTree::size(tree); }

    MatrixTree make_ops(TreeStats* stats = nullptr) const {
        return MatrixTree(MatrixMonoid{automaton->num_states()}, stats);
    }
};

inline DAIndex preprocess(std::shared_ptr<const VsetAutomaton> automaton,
                          const std::vector<SymbolId>& input) {
    const VsetAutomaton& a = *automaton;
    std::vector<std::shared_ptr<const CountMatrix>> letters(
        static_cast<std::size_t>(a.num_symbols()));
    std::vector<PosLabel> labels;
    labels.reserve(input.size());
    for (SymbolId s : input) {
        if (s < 0 || s >= a.num_symbols())
            throw std::invalid_argument("preprocess: symbol id out of range");
        auto& handle = letters[static_cast<std::size_t>(s)];
        if (!handle)
            handle = std::make_shared<CountMatrix>(letter_matrix(a, s));
        labels.push_back(PosLabel{s, handle});
    }
    MatrixTree ops(MatrixMonoid{a.num_states()});
    return DAIndex{std::move(automaton), ops.init(labels)};
}

inline Nat constrained_count(const DAIndex& ix, const MatrixTree::Tree& root) {
    if (!root)
        return count_from_product(*ix.automaton, CountMatrix::identity(ix.automaton->num_states()));
    return count_from_product(*ix.automaton, *root->prod);
}

inline Nat count(const DAIndex& ix) { return constrained_count(ix, ix.tree); }

// Replaces position j's matrix with the constrained matrix for (tau, current).
// The symbol stays; only the matrix handle changes, on a fresh private root.
inline MatrixTree::Tree pin(const MatrixTree& ops, const DAIndex& ix, const MatrixTree::Tree& root,
                            std::uint32_t position, const Mapping& tau,
                            std::optional<VarId> current) {
    SymbolId symbol = MatrixTree::get(root, position).symbol;
    auto matrix = std::make_shared<CountMatrix>(
        constrained_matrix(*ix.automaton, symbol, position, tau, current));
    return ops.set(root, position, PosLabel{symbol, std::move(matrix)});
}

// Fresh root with every position bound by tau pinned.  The access loop builds
// this incrementally (one set per step); this form serves one-shot queries.
inline MatrixTree::Tree pinned_root(const MatrixTree& ops, const DAIndex& ix, const Mapping& tau,
                                    std::optional<VarId> current) {
    std::vector<std::uint32_t> positions;
    for (VarMask mask = tau.domain(); mask != 0; mask &= mask - 1)
        positions.push_back(tau.position(static_cast<VarId>(std::countr_zero(mask))));
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

    MatrixTree::Tree root = ix.tree;
    for (std::uint32_t position : positions)
        root = pin(ops, ix, root, position, tau, current);
    return root;
}

inline Nat constrained_count(const DAIndex& ix, const Mapping& tau,
                             std::optional<VarId> current) {
    MatrixTree ops = ix.make_ops();
    return constrained_count(ix, pinned_root(ops, ix, tau, current));
}

struct AccessStats {
    std::uint64_t set_calls = 0;
    std::uint64_t multiplications = 0;
    std::uint64_t max_multiplications_per_set = 0;
};

// Returns the index-th mapping (1-based) of the automaton's output on the
// indexed string, ordered by the lexicographic extension of `order`.  One
// binary search per variable; each probe pins one position on a private root
// and reads the count off the root product.
inline Mapping direct_access(const DAIndex& ix, const Nat& index, const VarOrder& order,
                             AccessStats* stats = nullptr) {
    const VsetAutomaton& a = *ix.automaton;
    require_valid_order(a, order);
    if (index.is_zero())
        throw std::invalid_argument("direct_access: indices are 1-based");

    Nat total = count(ix);
    if (index > total)
        throw OutOfBoundsError(index, total);

    TreeStats tree_stats;
    MatrixTree ops = ix.make_ops(&tree_stats);
    auto pin_counted = [&](const MatrixTree::Tree& root, std::uint32_t position,
                           const Mapping& tau, std::optional<VarId> current) {
        std::uint64_t before = tree_stats.multiplications;
        MatrixTree::Tree out = pin(ops, ix, root, position, tau, current);
        if (stats) {
            ++stats->set_calls;
            stats->max_multiplications_per_set = std::max(
                stats->max_multiplications_per_set, tree_stats.multiplications - before);
        }
        return out;
    };

    std::uint32_t n = static_cast<std::uint32_t>(ix.length());
    Mapping tau(static_cast<int>(a.variables().size()));
    MatrixTree::Tree working = ix.tree;
    Nat residual = index;

    for (VarId x : order.sequence) {
        auto probe = [&](std::uint32_t j) {
            Mapping probe_tau = tau;
            probe_tau.bind(x, j);
            return constrained_count(ix, pin_counted(working, j, probe_tau, x));
        };

        // least j with probe(j) >= residual; probe(n) >= residual is
        // guaranteed entering each round (for the first variable by the
        // bounds check, afterwards by the subtraction below)
        std::uint32_t lo = 1;
        std::uint32_t hi = n;
        while (lo < hi) {
            std::uint32_t j = lo + (hi - lo) / 2;
            if (probe(j) >= residual)
                hi = j;
            else
                lo = j + 1;
        }

        if (lo > 1)
            residual -= probe(lo - 1);
        tau.bind(x, lo);
        working = pin_counted(working, lo, tau, std::nullopt);
    }

    if (stats)
        stats->multiplications += tree_stats.multiplications;
    return tau;
}

}  // namespace mso
