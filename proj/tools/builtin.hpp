#pragma once

#include <string_view>

// Built-in inputs for `bench` and `selftest`, so neither needs files on disk.
namespace builtin {

// Two-variable automaton over {a,b}: x1 marks an 'a' position, x2 marks a 'b'
// position, bound in either order with the second mark forced immediately
// when leaving q1.
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

inline constexpr std::string_view kWorkedInput = "abbab";

// Accepts any string over {a,b,c}; no variables.
inline constexpr std::string_view kAnyAbc = R"(alphabet a b c
state q0 initial final
trans q0 a - q0
trans q0 b - q0
trans q0 c - q0
)";

// Editing program: replace the fifth character of s1 with 'a'.
inline constexpr std::string_view kReplaceFifth = R"(db s1 bbbbcb
split S1 S2 = s1 4
split S3 S4 = S2 1
concat S5 = S1 'a'
concat S6 = S5 S4
output S6
)";

}  // namespace builtin
