#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <mso/matrix.hpp>
#include <mso/oracle.hpp>

#include "support/fixtures.hpp"

using namespace mso;

namespace {

CountMatrix from_rows(const std::vector<std::vector<std::uint64_t>>& rows) {
    CountMatrix m(static_cast<int>(rows.size()));
    for (int r = 0; r < m.dim(); ++r)
        for (int c = 0; c < m.dim(); ++c)
            m.at(r, c) = Nat(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    return m;
}

std::optional<VarId> last_bound(const Mapping& tau, const VarOrder& order) {
    std::optional<VarId> last;
    for (VarId v : order.sequence) {
        if (!tau.is_bound(v))
            break;
        last = v;
    }
    return last;
}

// Fold of per-position constrained matrices; the product form of a count
// under a prefix constraint.
CountMatrix constrained_product(const VsetAutomaton& a, const std::vector<SymbolId>& s,
                                const Mapping& tau, const VarOrder& order) {
    std::optional<VarId> current = last_bound(tau, order);
    CountMatrix m = CountMatrix::identity(a.num_states());
    for (std::size_t i = 0; i < s.size(); ++i)
        m = mat_mul(m, constrained_matrix(a, s[i], static_cast<std::uint32_t>(i + 1), tau, current));
    return m;
}

CountMatrix string_product(const VsetAutomaton& a, const std::vector<SymbolId>& s) {
    CountMatrix m = CountMatrix::identity(a.num_states());
    for (SymbolId c : s)
        m = mat_mul(m, letter_matrix(a, c));
    return m;
}

}  // namespace

TEST_CASE("letter matrices of the two-mark automaton") {
    VsetAutomaton a = fixtures::two_mark();
    REQUIRE(letter_matrix(a, 0) == from_rows({{1, 1, 0, 0},
                                              {0, 1, 0, 0},
                                              {0, 0, 0, 1},
                                              {0, 0, 0, 1}}));
    REQUIRE(letter_matrix(a, 1) == from_rows({{1, 0, 1, 0},
                                              {0, 0, 0, 1},
                                              {0, 0, 1, 0},
                                              {0, 0, 0, 1}}));
}

TEST_CASE("symbols without transitions give the zero matrix") {
    VsetAutomaton abc = fixtures::any_abc();
    RawAutomaton raw;
    raw.add_symbol("a");
    raw.add_symbol("c");
    raw.add_state("q0", true, true);
    raw.add_transition(0, 0, 0, 0);
    VsetAutomaton a = validate_automaton(raw).automaton;
    REQUIRE(letter_matrix(a, 1) == CountMatrix(1));
}

TEST_CASE("matrix product basics") {
    VsetAutomaton a = fixtures::two_mark();
    CountMatrix ma = letter_matrix(a, 0);
    CountMatrix mb = letter_matrix(a, 1);

    REQUIRE(mat_mul(ma, CountMatrix::identity(4)) == ma);
    REQUIRE(mat_mul(CountMatrix::identity(4), mb) == mb);
    REQUIRE(mat_mul(ma, mb).at(0, 3) == Nat(1));
    REQUIRE_THROWS_AS(mat_mul(ma, CountMatrix(3)), std::invalid_argument);
}

TEST_CASE("counting runs through the product") {
    VsetAutomaton a = fixtures::two_mark();

    REQUIRE(count_from_product(a, string_product(a, fixtures::to_syms(a, "abbab"))) == Nat(4));
    REQUIRE(count_from_product(a, string_product(a, fixtures::to_syms(a, "abbbab"))) == Nat(5));
    REQUIRE(count_from_product(a, string_product(a, fixtures::to_syms(a, "b"))) == Nat(0));
    REQUIRE(count_from_product(a, CountMatrix::identity(4)) == Nat(0));

    VsetAutomaton eps = parse_automaton(fixtures::kEpsilonOnly).automaton;
    REQUIRE(count_from_product(eps, CountMatrix::identity(1)) == Nat(1));
}

TEST_CASE("product is a homomorphism on strings up to length 6") {
    VsetAutomaton a = fixtures::two_mark();
    std::unordered_map<std::string, CountMatrix> products{{"", CountMatrix::identity(4)}};
    std::vector<std::string> frontier{""};
    for (int len = 1; len <= 12; ++len) {
        std::vector<std::string> next;
        for (const std::string& s : frontier) {
            for (char c : {'a', 'b'}) {
                std::string t = s + c;
                products.emplace(t, mat_mul(products.at(s), letter_matrix(a, c == 'a' ? 0 : 1)));
                next.push_back(std::move(t));
            }
        }
        frontier = std::move(next);
    }

    std::vector<std::string> shorts;
    for (const auto& [s, m] : products)
        if (s.size() <= 6)
            shorts.push_back(s);
    for (const std::string& s1 : shorts)
        for (const std::string& s2 : shorts)
            REQUIRE(mat_mul(products.at(s1), products.at(s2)) == products.at(s1 + s2));
}

TEST_CASE("product entries count partial runs") {
    VsetAutomaton a = fixtures::two_mark();
    std::vector<std::vector<SymbolId>> strings{{}};
    for (std::size_t i = 0; i < strings.size(); ++i) {
        if (strings[i].size() >= 6)
            continue;
        for (SymbolId c : {0, 1}) {
            auto next = strings[i];
            next.push_back(c);
            strings.push_back(std::move(next));
        }
    }
    for (const auto& s : strings) {
        CountMatrix m = string_product(a, s);
        for (StateId p = 0; p < a.num_states(); ++p)
            for (StateId q = 0; q < a.num_states(); ++q)
                REQUIRE(m.at(p, q) == count_partial_runs(a, p, s, q));
    }
}

TEST_CASE("constrained matrix examples") {
    VsetAutomaton a = fixtures::two_mark();
    VarOrder order = VarOrder::canonical(2);

    SECTION("both variables constrained to position 4, live variable x2") {
        Mapping tau = fixtures::mapping_of(2, {{0, 4}, {1, 4}});
        CountMatrix m = constrained_matrix(a, 0, 4, tau, VarId{1});
        REQUIRE(m.at(0, 1) == Nat(0));
        REQUIRE(m.at(2, 3) == Nat(1));
        REQUIRE(m.at(3, 3) == Nat(0));
        REQUIRE(m == from_rows({{0, 0, 0, 0},
                                {0, 0, 0, 0},
                                {0, 0, 0, 1},
                                {0, 0, 0, 0}}));
    }

    SECTION("x1 at its own position: only targets with x1 bound survive") {
        Mapping tau = fixtures::mapping_of(2, {{0, 2}});
        CountMatrix m = constrained_matrix(a, 1, 2, tau, VarId{0});
        REQUIRE(m.at(0, 2) == Nat(0));
        REQUIRE(m == from_rows({{0, 0, 0, 0},
                                {0, 0, 0, 1},
                                {0, 0, 0, 0},
                                {0, 0, 0, 1}}));
    }

    SECTION("empty constraint equals the letter matrix at every position") {
        Mapping empty(2);
        for (std::uint32_t i = 1; i <= 6; ++i) {
            REQUIRE(constrained_matrix(a, 0, i, empty, std::nullopt) == letter_matrix(a, 0));
            REQUIRE(constrained_matrix(a, 1, i, empty, std::nullopt) == letter_matrix(a, 1));
        }
    }

    SECTION("pinned form requires the variable at the position exactly") {
        // x1 pinned to position 2 on a 'b': no b-transition carries x1.
        Mapping tau = fixtures::mapping_of(2, {{0, 2}});
        REQUIRE(constrained_matrix(a, 1, 2, tau, std::nullopt) == CountMatrix(4));

        Mapping at1 = fixtures::mapping_of(2, {{0, 1}});
        REQUIRE(constrained_matrix(a, 0, 1, at1, std::nullopt) == from_rows({{0, 1, 0, 0},
                                                                             {0, 0, 0, 0},
                                                                             {0, 0, 0, 1},
                                                                             {0, 0, 0, 0}}));
    }

    SECTION("argument validation") {
        Mapping tau = fixtures::mapping_of(2, {{0, 2}});
        REQUIRE_THROWS_AS(constrained_matrix(a, 0, 0, tau, std::nullopt), std::invalid_argument);
        REQUIRE_THROWS_AS(constrained_matrix(a, 0, 2, tau, VarId{1}), std::invalid_argument);
    }

    SECTION("constrained counts from the running example") {
        auto s = fixtures::to_syms(a, "abbab");
        auto count_for = [&](const Mapping& tau) {
            return count_from_product(a, constrained_product(a, s, tau, order));
        };
        REQUIRE(count_for(fixtures::mapping_of(2, {{0, 2}})) == Nat(1));
        REQUIRE(count_for(fixtures::mapping_of(2, {{0, 2}, {1, 3}})) == Nat(0));
        REQUIRE(count_for(fixtures::mapping_of(2, {{0, 4}, {1, 3}})) == Nat(2));
        REQUIRE(count_for(Mapping(2)) == Nat(4));
    }
}

TEST_CASE("constrained counts match the oracle on small instances") {
    auto sweep = [](const VsetAutomaton& a, int max_len) {
        std::vector<VarOrder> orders{VarOrder::canonical(a.num_vars())};
        if (a.num_vars() > 1) {
            VarOrder rev = orders[0];
            std::reverse(rev.sequence.begin(), rev.sequence.end());
            orders.push_back(rev);
        }

        std::vector<std::vector<SymbolId>> strings{{}};
        for (std::size_t i = 0; i < strings.size(); ++i) {
            if (static_cast<int>(strings[i].size()) >= max_len)
                continue;
            for (SymbolId c = 0; c < a.num_symbols(); ++c) {
                auto next = strings[i];
                next.push_back(c);
                strings.push_back(std::move(next));
            }
        }

        for (const auto& s : strings) {
            std::uint32_t n = static_cast<std::uint32_t>(s.size());
            for (const VarOrder& order : orders) {
                Mapping empty(a.num_vars());
                REQUIRE(count_from_product(a, constrained_product(a, s, empty, order)) ==
                        constrained_count_oracle(a, s, empty, order));
                std::vector<Mapping> prefixes{empty};
                for (VarId v : order.sequence) {
                    std::vector<Mapping> extended;
                    for (const Mapping& base : prefixes)
                        for (std::uint32_t pos = 1; pos <= n; ++pos) {
                            Mapping next = base;
                            next.bind(v, pos);
                            extended.push_back(next);
                        }
                    for (const Mapping& tau : extended) {
                        Nat matrix_count =
                            count_from_product(a, constrained_product(a, s, tau, order));
                        REQUIRE(matrix_count == constrained_count_oracle(a, s, tau, order));
                    }
                    prefixes = std::move(extended);
                }
            }
        }
    };

    sweep(fixtures::two_mark(), 5);
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u, 16u})
        sweep(random_unambiguous_automaton(seed), 4);
}
