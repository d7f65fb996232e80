#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <mso/direct_access.hpp>
#include <mso/editing.hpp>
#include <mso/oracle.hpp>

#include "builtin.hpp"

namespace {

using namespace mso;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string join_symbols(const VsetAutomaton& a, std::span<const SymbolId> syms) {
    std::string out;
    for (SymbolId s : syms) {
        if (!out.empty())
            out += ' ';
        out += a.symbols()[static_cast<std::size_t>(s)];
    }
    return out;
}

std::shared_ptr<const VsetAutomaton> freeze_checked(ValidationResult res) {
    AmbiguityOutcome amb = check_unambiguous(res.automaton);
    if (!amb.unambiguous)
        throw ValidationError("the automaton is ambiguous: two runs share the output on '" +
                              join_symbols(res.automaton, amb.witness) + "'");
    return std::make_shared<VsetAutomaton>(std::move(res.automaton));
}

std::shared_ptr<const VsetAutomaton> load_automaton(const std::string& path) {
    return freeze_checked(parse_automaton(read_file(path)));
}

VarOrder order_of(const VsetAutomaton& a, const std::string& csv) {
    if (csv.empty())
        return VarOrder::canonical(static_cast<int>(a.variables().size()));
    return parse_var_order(a, csv);
}

std::string mapping_line(const VsetAutomaton& a, const Mapping& m, const VarOrder& order) {
    std::string line = format_mapping(a, m, order);
    return line.empty() ? "()" : line;
}

// --input FILE / --text STRING (exactly one), plus --chars to split the raw
// text into characters instead of whitespace-separated tokens.
struct InputOpts {
    std::string file;
    std::string text;
    bool chars = false;
    CLI::Option* text_opt = nullptr;

    void attach(CLI::App* cmd) {
        auto* group = cmd->add_option_group("input", "the string to query");
        group->add_option("--input", file, "file holding the input string")
            ->check(CLI::ExistingFile);
        text_opt = group->add_option("--text", text, "the input string itself");
        group->require_option(1);
        cmd->add_flag("--chars", chars, "one symbol per character, not per whitespace token");
    }

    std::vector<SymbolId> resolve(const VsetAutomaton& a) const {
        std::string raw = text_opt->count() > 0 ? text : read_file(file);
        return resolve_input(a, split_input_text(raw, chars));
    }
};

int cmd_validate(const std::string& path) {
    ValidationResult res = parse_automaton(read_file(path));
    const VsetAutomaton& a = res.automaton;

    if (!res.removed_states.empty()) {
        std::cout << "notice: trimmed " << res.removed_states.size()
                  << (res.removed_states.size() == 1 ? " state" : " states")
                  << " that no accepting run visits:";
        for (const std::string& name : res.removed_states)
            std::cout << ' ' << name;
        std::cout << '\n';
    }

    std::cout << "states:";
    for (const std::string& name : a.state_names())
        std::cout << ' ' << name;
    std::cout << '\n';
    std::cout << "symbols:";
    for (const std::string& name : a.symbols())
        std::cout << ' ' << name;
    std::cout << '\n';
    std::cout << "variables:";
    for (const std::string& name : a.variables())
        std::cout << ' ' << name;
    std::cout << '\n';
    for (StateId q = 0; q < a.num_states(); ++q)
        std::cout << "X_{" << a.state_names()[static_cast<std::size_t>(q)]
                  << "} = " << format_var_set(a.variables(), a.var_set(q)) << '\n';
    std::cout << "functional: yes\n";

    AmbiguityOutcome amb = check_unambiguous(a);
    if (amb.unambiguous) {
        std::cout << "unambiguous: yes\n";
        return 0;
    }
    std::cout << "unambiguous: no\n";
    std::cerr << "error: two accepting runs share the output on '" << join_symbols(a, amb.witness)
              << "'\n";
    return 2;
}

int cmd_count(const std::string& apath, const InputOpts& in) {
    auto a = load_automaton(apath);
    DAIndex ix = preprocess(a, in.resolve(*a));
    std::cout << count(ix) << '\n';
    return 0;
}

int cmd_get(const std::string& apath, const InputOpts& in, const std::string& index_text,
            const std::string& order_csv) {
    auto a = load_automaton(apath);
    DAIndex ix = preprocess(a, in.resolve(*a));
    VarOrder order = order_of(*a, order_csv);
    Mapping m = direct_access(ix, Nat::from_decimal(index_text), order);
    std::cout << mapping_line(*a, m, order) << '\n';
    return 0;
}

int cmd_enumerate(const std::string& apath, const InputOpts& in, const std::string& order_csv,
                  bool use_oracle) {
    auto a = load_automaton(apath);
    std::vector<SymbolId> syms = in.resolve(*a);
    VarOrder order = order_of(*a, order_csv);
    if (use_oracle) {
        for (const Mapping& m : sorted_outputs(*a, syms, order))
            std::cout << mapping_line(*a, m, order) << '\n';
        return 0;
    }
    DAIndex ix = preprocess(a, syms);
    Nat total = count(ix);
    for (Nat i(1); i <= total; i += Nat(1))
        std::cout << mapping_line(*a, direct_access(ix, i, order), order) << '\n';
    return 0;
}

int cmd_edit(const std::string& apath, const std::string& ppath, bool want_count,
             const std::string& index_text, const std::string& order_csv) {
    auto a = load_automaton(apath);
    EditProgram program = parse_edit_program(read_file(ppath));
    StringsDB db = StringsDB::from_program(a, program);
    DAIndex edited = apply_program(program, db);
    if (want_count) {
        std::cout << count(edited) << '\n';
        return 0;
    }
    if (!index_text.empty()) {
        VarOrder order = order_of(*a, order_csv);
        Mapping m = direct_access(edited, Nat::from_decimal(index_text), order);
        std::cout << mapping_line(*a, m, order) << '\n';
        return 0;
    }
    std::cout << materialize_text(edited) << '\n';
    return 0;
}

std::uint64_t ceil_log2(std::uint64_t n) {
    return n <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(n - 1));
}

std::uint64_t mults_per_set_budget(std::uint64_t len) {
    double bound = std::ceil(1.4405 * std::log2(static_cast<double>(len + 2)));
    return 2 * static_cast<std::uint64_t>(bound) + 2;
}

std::vector<SymbolId> random_symbols(const VsetAutomaton& a, std::uint64_t n,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<SymbolId> syms(n);
    auto k = static_cast<std::uint64_t>(a.num_symbols());
    for (SymbolId& s : syms)
        s = static_cast<SymbolId>(rng() % k);
    return syms;
}

struct AccessProfile {
    Nat total;
    std::uint64_t tree_height = 0;
    std::uint64_t samples = 0;
    std::uint64_t max_sets = 0;
    std::uint64_t max_mults_per_set = 0;
    std::uint64_t max_access_mults = 0;
};

AccessProfile profile_access(const std::shared_ptr<const VsetAutomaton>& a, std::uint64_t n,
                             std::uint64_t seed) {
    DAIndex ix = preprocess(a, random_symbols(*a, n, seed));
    AccessProfile p;
    p.tree_height = static_cast<std::uint64_t>(MatrixTree::height(ix.tree));
    p.total = count(ix);
    VarOrder order = VarOrder::canonical(static_cast<int>(a->variables().size()));

    std::vector<Nat> indices;
    for (Nat i(1); i <= p.total; i *= Nat(2))
        indices.push_back(i);
    if (!p.total.is_zero() && (indices.empty() || !(indices.back() == p.total)))
        indices.push_back(p.total);

    for (const Nat& i : indices) {
        AccessStats st;
        direct_access(ix, i, order, &st);
        p.max_sets = std::max(p.max_sets, st.set_calls);
        p.max_mults_per_set = std::max(p.max_mults_per_set, st.max_multiplications_per_set);
        p.max_access_mults = std::max(p.max_access_mults, st.multiplications);
    }
    p.samples = indices.size();
    return p;
}

struct EditProfile {
    std::uint64_t steps = 0;
    std::uint64_t max_step_nodes = 0;
};

// Exercises every primitive over a fresh random string of length n: split and
// rejoin, then cut an infix and paste it back elsewhere (n >= 4; shorter
// strings only split and rejoin).
EditProfile profile_edit(const std::shared_ptr<const VsetAutomaton>& a, std::uint64_t n,
                         std::uint64_t seed) {
    std::vector<SymbolId> syms = random_symbols(*a, n, seed + 1);
    std::string text = "db t";
    for (SymbolId s : syms) {
        text += " '";
        text += a->symbols()[static_cast<std::size_t>(s)];
        text += '\'';
    }
    text += '\n';
    text += "split A B = t " + std::to_string(n / 2) + "\n";
    text += "concat C = A B\n";
    if (n >= 4) {
        text += "cut D E = C " + std::to_string(n / 4) + " " + std::to_string(n / 2) + "\n";
        text += "paste F = E D " + std::to_string(n / 8) + "\n";
        text += "output F\n";
    } else {
        text += "output C\n";
    }

    EditProgram program = parse_edit_program(text);
    StringsDB db = StringsDB::from_program(a, program);
    EditStats stats;
    apply_program(program, db, &stats);

    EditProfile p;
    p.steps = stats.steps.size();
    for (const EditStepStats& s : stats.steps)
        p.max_step_nodes = std::max(p.max_step_nodes, s.node_constructions);
    return p;
}

int cmd_bench(const std::string& apath, std::uint64_t n, std::uint64_t seed) {
    auto a = apath.empty() ? freeze_checked(parse_automaton(builtin::kTwoMark))
                           : load_automaton(apath);
    auto var_count = static_cast<std::uint64_t>(a->variables().size());

    std::uint64_t sets_budget = var_count * (ceil_log2(n) + 3);
    std::uint64_t mults_budget = mults_per_set_budget(n);
    std::uint64_t edit_budget = 4 * ceil_log2(n) + 8;
    auto height_budget = static_cast<std::uint64_t>(
        std::ceil(1.4405 * std::log2(static_cast<double>(n + 2))));

    AccessProfile access = profile_access(a, n, seed);
    EditProfile edit = profile_edit(a, n, seed);
    AccessProfile doubling_lo = profile_access(a, std::uint64_t{1} << 12, seed);
    AccessProfile doubling_hi = profile_access(a, std::uint64_t{1} << 13, seed);

    auto delta = [](std::uint64_t hi, std::uint64_t lo) {
        return static_cast<std::int64_t>(hi) - static_cast<std::int64_t>(lo);
    };
    std::int64_t sets_delta = delta(doubling_hi.max_sets, doubling_lo.max_sets);
    std::int64_t mults_per_set_delta =
        delta(doubling_hi.max_mults_per_set, doubling_lo.max_mults_per_set);
    std::int64_t access_mults_delta =
        delta(doubling_hi.max_access_mults, doubling_lo.max_access_mults);

    std::cout << "n=" << n << '\n';
    std::cout << "seed=" << seed << '\n';
    std::cout << "variables=" << var_count << '\n';
    std::cout << "count=" << access.total << '\n';
    std::cout << "tree_height=" << access.tree_height << '\n';
    std::cout << "tree_height_budget=" << height_budget << '\n';
    std::cout << "access_samples=" << access.samples << '\n';
    std::cout << "sets_per_access_max=" << access.max_sets << '\n';
    std::cout << "sets_per_access_budget=" << sets_budget << '\n';
    std::cout << "mults_per_set_max=" << access.max_mults_per_set << '\n';
    std::cout << "mults_per_set_budget=" << mults_budget << '\n';
    std::cout << "mults_per_access_max=" << access.max_access_mults << '\n';
    std::cout << "edit_steps=" << edit.steps << '\n';
    std::cout << "edit_step_nodes_max=" << edit.max_step_nodes << '\n';
    std::cout << "edit_step_nodes_budget=" << edit_budget << '\n';
    std::cout << "doubling_sets_delta=" << sets_delta << '\n';
    std::cout << "doubling_mults_per_set_delta=" << mults_per_set_delta << '\n';
    std::cout << "doubling_mults_per_access_delta=" << access_mults_delta << '\n';

    std::vector<std::string> problems;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok)
            problems.push_back(what);
    };
    expect(access.tree_height <= height_budget,
           "tree height " + std::to_string(access.tree_height) + " exceeds " +
               std::to_string(height_budget));
    expect(access.max_sets <= sets_budget,
           "sets per access " + std::to_string(access.max_sets) + " exceeds " +
               std::to_string(sets_budget));
    expect(access.max_mults_per_set <= mults_budget,
           "multiplications per set " + std::to_string(access.max_mults_per_set) + " exceeds " +
               std::to_string(mults_budget));
    expect(edit.max_step_nodes <= edit_budget,
           "node constructions per edit step " + std::to_string(edit.max_step_nodes) +
               " exceeds " + std::to_string(edit_budget));
    expect(sets_delta <= static_cast<std::int64_t>(var_count),
           "doubling the input grew sets per access by " + std::to_string(sets_delta) +
               ", more than one per variable");
    expect(mults_per_set_delta <= 4,
           "doubling the input grew multiplications per set by " +
               std::to_string(mults_per_set_delta) + ", more than the 4 allowed");

    if (!problems.empty()) {
        for (const std::string& p : problems)
            std::cerr << "budget violation: " << p << '\n';
        return 4;
    }
    return 0;
}

int cmd_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name, const std::string& detail = "") {
        if (ok) {
            std::cout << "PASS: " << name << '\n';
        } else {
            ++failures;
            std::cout << "FAIL: " << name << (detail.empty() ? "" : " (" + detail + ")") << '\n';
        }
    };

    auto two_mark = freeze_checked(parse_automaton(builtin::kTwoMark));
    check(true, "two-mark automaton validates as functional and unambiguous");

    std::vector<SymbolId> input =
        resolve_input(*two_mark, split_input_text(builtin::kWorkedInput, /*chars=*/true));
    DAIndex ix = preprocess(two_mark, input);
    Nat total = count(ix);
    check(total == Nat(4), "count over abbab is 4", total.to_decimal());

    VarOrder order = VarOrder::canonical(2);
    const std::array<std::string, 4> expected = {"x1=1 x2=2", "x1=4 x2=2", "x1=4 x2=3",
                                                 "x1=4 x2=5"};
    std::string table_got;
    bool table_ok = true;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        std::string got = mapping_line(*two_mark, direct_access(ix, Nat(i + 1), order), order);
        if (got != expected[i]) {
            table_ok = false;
            table_got = "index " + std::to_string(i + 1) + " gave " + got;
            break;
        }
    }
    check(table_ok, "accesses 1..4 list the outputs in order", table_got);

    bool oob_ok = false;
    try {
        direct_access(ix, Nat(5), order);
    } catch (const OutOfBoundsError& e) {
        oob_ok = e.index() == Nat(5) && e.total() == Nat(4);
    }
    check(oob_ok, "access 5 is rejected as out-of-bounds with total 4");

    struct ConstrainedCase {
        std::vector<std::pair<VarId, std::uint32_t>> binds;
        Nat expected;
        std::string name;
    };
    const std::vector<ConstrainedCase> cases = {
        {{{0, 2}}, Nat(1), "constrained count with x1<=2 is 1"},
        {{{0, 2}, {1, 3}}, Nat(0), "constrained count with x1=2 x2<=3 is 0"},
        {{{0, 4}, {1, 3}}, Nat(2), "constrained count with x1=4 x2<=3 is 2"},
    };
    for (const ConstrainedCase& c : cases) {
        Mapping tau(2);
        for (auto [v, pos] : c.binds)
            tau.bind(v, pos);
        Nat via_matrices = constrained_count(ix, tau, c.binds.back().first);
        Nat via_runs = constrained_count_oracle(*two_mark, input, tau, order);
        check(via_matrices == c.expected && via_runs == c.expected, c.name,
              "matrices gave " + via_matrices.to_decimal() + ", run enumeration gave " +
                  via_runs.to_decimal());
    }

    auto any_abc = freeze_checked(parse_automaton(builtin::kAnyAbc));
    EditProgram program = parse_edit_program(builtin::kReplaceFifth);
    StringsDB db = StringsDB::from_program(any_abc, program);
    DAIndex edited = apply_program(program, db);
    std::string result = materialize_text(edited);
    check(result == "bbbbab", "replacement program rewrites bbbbcb to bbbbab", result);

    if (failures > 0) {
        std::cout << "selftest: " << failures << " check(s) failed\n";
        return 2;
    }
    std::cout << "selftest: ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"direct-access queries over automaton-indexed strings"};
    app.require_subcommand(1);

    auto* sc_validate = app.add_subcommand("validate", "parse an automaton and report its analysis");
    std::string v_automaton;
    sc_validate->add_option("--automaton", v_automaton, "automaton file")
        ->required()
        ->check(CLI::ExistingFile);

    auto* sc_count = app.add_subcommand("count", "count the outputs on an input string");
    std::string c_automaton;
    InputOpts c_in;
    sc_count->add_option("--automaton", c_automaton, "automaton file")
        ->required()
        ->check(CLI::ExistingFile);
    c_in.attach(sc_count);

    auto* sc_get = app.add_subcommand("get", "retrieve one output by its 1-based index");
    std::string g_automaton, g_index, g_order;
    InputOpts g_in;
    sc_get->add_option("--automaton", g_automaton, "automaton file")
        ->required()
        ->check(CLI::ExistingFile);
    g_in.attach(sc_get);
    sc_get->add_option("--index", g_index, "1-based output index")->required();
    sc_get->add_option("--order", g_order, "variable order, e.g. x2,x1 (default: declaration order)");

    auto* sc_enumerate = app.add_subcommand("enumerate", "list every output in order");
    std::string e_automaton, e_order;
    bool e_oracle = false;
    InputOpts e_in;
    sc_enumerate->add_option("--automaton", e_automaton, "automaton file")
        ->required()
        ->check(CLI::ExistingFile);
    e_in.attach(sc_enumerate);
    sc_enumerate->add_option("--order", e_order, "variable order (default: declaration order)");
    sc_enumerate->add_flag("--oracle", e_oracle,
                           "enumerate by simulating runs instead of repeated indexed access");

    auto* sc_edit = app.add_subcommand("edit", "run an editing program over a strings database");
    std::string d_automaton, d_program, d_index, d_order;
    bool d_count = false;
    sc_edit->add_option("--automaton", d_automaton, "automaton file")
        ->required()
        ->check(CLI::ExistingFile);
    sc_edit->add_option("--program", d_program, "editing program file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* d_count_flag =
        sc_edit->add_flag("--count", d_count, "print the output count of the edited string");
    sc_edit->add_option("--index", d_index, "print the mapping at this 1-based index")
        ->excludes(d_count_flag);
    sc_edit->add_option("--order", d_order, "variable order for --index");

    auto* sc_bench = app.add_subcommand("bench", "measure access and edit costs against budgets");
    std::string b_automaton;
    std::uint64_t b_n = 65536;
    std::uint64_t b_seed = 1;
    sc_bench
        ->add_option("--automaton", b_automaton,
                     "automaton file (default: built-in two-mark automaton)")
        ->check(CLI::ExistingFile);
    sc_bench->add_option("--n", b_n, "input length (default 65536)")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 24));
    sc_bench->add_option("--seed", b_seed, "random seed (default 1)");

    auto* sc_selftest = app.add_subcommand("selftest", "run the built-in worked examples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(sc_validate))
            return cmd_validate(v_automaton);
        if (app.got_subcommand(sc_count))
            return cmd_count(c_automaton, c_in);
        if (app.got_subcommand(sc_get))
            return cmd_get(g_automaton, g_in, g_index, g_order);
        if (app.got_subcommand(sc_enumerate))
            return cmd_enumerate(e_automaton, e_in, e_order, e_oracle);
        if (app.got_subcommand(sc_edit))
            return cmd_edit(d_automaton, d_program, d_count, d_index, d_order);
        if (app.got_subcommand(sc_bench))
            return cmd_bench(b_automaton, b_n, b_seed);
        if (app.got_subcommand(sc_selftest))
            return cmd_selftest();
    } catch (const OutOfBoundsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
