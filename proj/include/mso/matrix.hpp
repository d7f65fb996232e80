#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <mso/automaton.hpp>
#include <mso/errors.hpp>
#include <mso/nat.hpp>

namespace mso {

// Dense square matrix of run counts, indexed by automaton states.
class CountMatrix {
public:
    explicit CountMatrix(int dim) : dim_(dim), cells_(static_cast<std::size_t>(dim) * dim) {}

    static CountMatrix identity(int dim) {
        CountMatrix m(dim);
        for (int i = 0; i < dim; ++i)
            m.at(i, i) = Nat(1);
        return m;
    }

    int dim() const { return dim_; }

    Nat& at(int row, int col) {
        return cells_[static_cast<std::size_t>(row) * dim_ + static_cast<std::size_t>(col)];
    }
    const Nat& at(int row, int col) const {
        return cells_[static_cast<std::size_t>(row) * dim_ + static_cast<std::size_t>(col)];
    }

    friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

private:
    int dim_;
    std::vector<Nat> cells_;
};

// Plain cubic product.  Zero entries are skipped before multiplying, which
// matters for sparse letter matrices of large state spaces; the kernel sits
// behind this one function so it can be swapped without touching callers.
inline CountMatrix mat_mul(const CountMatrix& a, const CountMatrix& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("mat_mul: dimension mismatch");
    int d = a.dim();
    CountMatrix out(d);
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            const Nat& lhs = a.at(i, k);
            if (lhs.is_zero())
                continue;
            for (int j = 0; j < d; ++j) {
                const Nat& rhs = b.at(k, j);
                if (rhs.is_zero())
                    continue;
                out.at(i, j).add_product(lhs, rhs);
            }
        }
    }
    return out;
}

// Row vector over the state space; used for the initial and final contractions.
class StateVector {
public:
    explicit StateVector(int dim) : cells_(static_cast<std::size_t>(dim)) {}

    static StateVector unit(int dim, int index) {
        StateVector v(dim);
        v.at(index) = Nat(1);
        return v;
    }

    int dim() const { return static_cast<int>(cells_.size()); }
    Nat& at(int i) { return cells_[static_cast<std::size_t>(i)]; }
    const Nat& at(int i) const { return cells_[static_cast<std::size_t>(i)]; }

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    std::vector<Nat> cells_;
};

inline StateVector initial_vector(const VsetAutomaton& a) {
    return StateVector::unit(a.num_states(), a.initial());
}

inline StateVector final_vector(const VsetAutomaton& a) {
    StateVector v(a.num_states());
    for (StateId f : a.finals())
        v.at(f) = Nat(1);
    return v;
}

inline StateVector vec_mat(const StateVector& v, const CountMatrix& m) {
    if (v.dim() != m.dim())
        throw std::invalid_argument("vec_mat: dimension mismatch");
    StateVector out(v.dim());
    for (int i = 0; i < v.dim(); ++i) {
        const Nat& w = v.at(i);
        if (w.is_zero())
            continue;
        for (int j = 0; j < m.dim(); ++j) {
            const Nat& cell = m.at(i, j);
            if (!cell.is_zero())
                out.at(j).add_product(w, cell);
        }
    }
    return out;
}

inline Nat dot(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("dot: dimension mismatch");
    Nat sum;
    for (int i = 0; i < a.dim(); ++i)
        sum.add_product(a.at(i), b.at(i));
    return sum;
}

// Number of runs from the initial state to a final state, read off a product
// of per-position matrices.
inline Nat count_from_product(const VsetAutomaton& a, const CountMatrix& m) {
    return dot(vec_mat(initial_vector(a), m), final_vector(a));
}

// One-step counting matrix: entry [p,q] is 1 exactly when some transition
// reads `symbol` from p to q.
inline CountMatrix letter_matrix(const VsetAutomaton& a, SymbolId symbol) {
    CountMatrix m(a.num_states());
    for (const Transition& t : a.transitions())
        if (t.symbol == symbol)
            m.at(t.src, t.dst) = Nat(1);
    return m;
}

// Letter matrix restricted by a partial assignment: a transition (p, a, S, q)
// survives at position i when
//   (1) every variable tau binds to i, except the live variable itself,
//       appears in S, and
//   (2) if tau binds the live variable to i, the target state has it bound
//       (live variable's position is <= i exactly when it is in X_q).
// `current` is the live variable - the most recent one in the active order -
// or absent for the pinned form where condition (2) must not fire.
inline CountMatrix constrained_matrix(const VsetAutomaton& a, SymbolId symbol,
                                      std::uint32_t position, const Mapping& tau,
                                      std::optional<VarId> current) {
    if (position == 0)
        throw std::invalid_argument("constrained_matrix: positions are 1-based");
    if (current.has_value() && !tau.is_bound(*current))
        throw std::invalid_argument("constrained_matrix: live variable is not bound by tau");

    VarMask here = tau.vars_at(position);
    VarMask required = current.has_value() ? (here & ~var_bit(*current)) : here;
    bool live_here = current.has_value() && tau.position(*current) == position;

    CountMatrix m(a.num_states());
    for (const Transition& t : a.transitions()) {
        if (t.symbol != symbol)
            continue;
        if (!mask_subset(required, t.vars))
            continue;
        if (live_here && (a.var_set(t.dst) & var_bit(*current)) == 0)
            continue;
        m.at(t.src, t.dst) = Nat(1);
    }
    return m;
}

}  // namespace mso
