#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <mso/automaton.hpp>

namespace fixtures {

// Two-variable automaton over {a,b}: x1 marks an 'a' position, x2 marks a 'b'
// position, bound in either order with the second mark forced immediately
// when leaving q1.  Four states, ten transitions.
inline constexpr std::string_view kTwoMark = R"(# two-mark automaton
alphabet a b
var x1
var x2
state q0 initial
state q1
state q2
state q3 final
trans q0 a - q0
trans q0 a x1 q1
trans q0 b - q0
trans q0 b x2 q2
trans q1 a - q1
trans q1 b x2 q3
trans q2 b - q2
trans q2 a x1 q3
trans q3 a - q3
trans q3 b - q3
)";

// Accepts any string over {a,b,c}; no variables.
inline constexpr std::string_view kAnyAbc = R"(alphabet a b c
state q0 initial final
trans q0 a - q0
trans q0 b - q0
trans q0 c - q0
)";

// Accepts only the empty string.
inline constexpr std::string_view kEpsilonOnly = R"(alphabet a
state q0 initial final
)";

// Functional but ambiguous: "aa" has two runs producing x1=2.
inline constexpr std::string_view kAmbiguous = R"(alphabet a
var x1
state q0 initial
state q1
state q2
state q3 final
trans q0 a - q1
trans q0 a - q2
trans q1 a x1 q3
trans q2 a x1 q3
)";

// Two paths into q1 binding different variable sets.
inline constexpr std::string_view kVarConflict = R"(alphabet a b
var x1
var x2
state q0 initial
state q1 final
trans q0 a x1 q1
trans q0 b x1,x2 q1
)";

// Rebinds x1 on a path where it is already bound.
inline constexpr std::string_view kRebind = R"(alphabet a
var x1
state q0 initial
state q1
state q2 final
trans q0 a x1 q1
trans q1 a x1 q2
)";

// Final state reachable without ever binding x2.
inline constexpr std::string_view kFinalDeficit = R"(alphabet a
var x1
var x2
state q0 initial
state q1 final
trans q0 a x1 q1
)";

// No final state is reachable.
inline constexpr std::string_view kUnreachableFinal = R"(alphabet a
state q0 initial
state q1 final
trans q1 a - q1
)";

// The two-mark automaton plus a state that no useful path touches.
inline constexpr std::string_view kWithIsolated = R"(alphabet a b
var x1
var x2
state q0 initial
state q1
state q2
state q3 final
state q4
trans q0 a - q0
trans q0 a x1 q1
trans q0 b - q0
trans q0 b x2 q2
trans q1 a - q1
trans q1 b x2 q3
trans q2 b - q2
trans q2 a x1 q3
trans q3 a - q3
trans q3 b - q3
trans q4 a - q4
)";

// Editing program: replace the fifth character of s1 with 'a'.
inline constexpr std::string_view kReplaceFifth = R"(db s1 bbbbcb
split S1 S2 = s1 4
split S3 S4 = S2 1
concat S5 = S1 'a'
concat S6 = S5 S4
output S6
)";

inline mso::VsetAutomaton two_mark() {
    return mso::parse_automaton(kTwoMark).automaton;
}

inline mso::VsetAutomaton any_abc() {
    return mso::parse_automaton(kAnyAbc).automaton;
}

inline std::vector<mso::SymbolId> to_syms(const mso::VsetAutomaton& a, std::string_view text) {
    return mso::resolve_input(a, mso::split_input_text(text, /*chars=*/true));
}

inline mso::Mapping mapping_of(int num_vars,
                               std::initializer_list<std::pair<mso::VarId, std::uint32_t>> binds) {
    mso::Mapping m(num_vars);
    for (auto [v, pos] : binds)
        m.bind(v, pos);
    return m;
}

}  // namespace fixtures
