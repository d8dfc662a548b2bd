#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace smartground {

enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div };
enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

/// A non-ground term of the input dialect.
///
/// Function terms keep their arguments in `args`; arithmetic terms keep
/// exactly two operands there (left, right). Interval bounds live in
/// `number` (lower) and `upper`.
struct Term {
    enum class Kind : std::uint8_t { Integer, Symbol, Variable, Anonymous, Function, Arithmetic, Interval };

    Kind kind = Kind::Integer;
    std::int64_t number = 0;
    std::int64_t upper = 0;
    std::string name;
    ArithOp op = ArithOp::Add;
    std::vector<Term> args;

    static Term integer(std::int64_t value);
    static Term symbol(std::string name);
    static Term variable(std::string name);
    static Term anonymous();
    static Term function(std::string name, std::vector<Term> args);
    static Term arithmetic(ArithOp op, Term lhs, Term rhs);
    static Term interval(std::int64_t lower, std::int64_t upper);

    bool is_variable() const { return kind == Kind::Variable; }
    bool is_ground() const;
    bool contains_arithmetic() const;
    bool contains_interval() const;

    friend bool operator==(const Term&, const Term&) = default;
};

struct PredicateKey {
    std::string name;
    std::size_t arity = 0;

    friend auto operator<=>(const PredicateKey&, const PredicateKey&) = default;
    friend bool operator==(const PredicateKey&, const PredicateKey&) = default;
};

std::string to_string(const PredicateKey& key);

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    PredicateKey key() const { return {predicate, args.size()}; }
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// A body element: an atom (possibly under `not`) or a built-in comparison.
/// Comparisons carry no polarity.
struct Literal {
    enum class Kind : std::uint8_t { Atom, Comparison };

    Kind kind = Kind::Atom;
    bool negative = false;
    Atom atom;
    CmpOp cmp = CmpOp::Eq;
    Term lhs;
    Term rhs;

    static Literal positive(Atom atom);
    static Literal negated(Atom atom);
    static Literal comparison(CmpOp op, Term lhs, Term rhs);

    bool is_positive_atom() const { return kind == Kind::Atom && !negative; }
    bool is_negative_atom() const { return kind == Kind::Atom && negative; }
    bool is_comparison() const { return kind == Kind::Comparison; }

    friend bool operator==(const Literal&, const Literal&) = default;
};

struct Rule {
    std::vector<Atom> head;
    std::vector<Literal> body;

    bool is_constraint() const { return head.empty(); }
    /// Singleton head, empty body. Interval arguments are allowed.
    bool is_fact() const { return head.size() == 1 && body.empty(); }
    bool is_ground() const;

    std::vector<const Literal*> positive_body() const;
    std::vector<const Literal*> negative_body() const;

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct Program {
    std::vector<Rule> rules;

    std::vector<const Rule*> facts() const;
    /// Predicates defined only by facts.
    std::set<PredicateKey> edb_predicates() const;
    /// Predicates defined by at least one rule that is not a fact.
    std::set<PredicateKey> idb_predicates() const;
    /// Every predicate mentioned anywhere in the program.
    std::set<PredicateKey> predicates() const;

    friend bool operator==(const Program&, const Program&) = default;
};

using VariableSet = std::set<std::string>;

struct SafetyReport {
    bool safe = true;
    VariableSet unsafe_variables;
};

struct VariableSets {
    VariableSet head;
    VariableSet body;
    VariableSet all;
};

/// Adds every named variable of `term` to `out`. Anonymous variables are skipped.
void collect_variables(const Term& term, VariableSet& out);
void collect_variables(const Atom& atom, VariableSet& out);
void collect_variables(const Literal& literal, VariableSet& out);

/// Variables that a positive atom binds by pattern matching: those that do
/// not sit inside an arithmetic term.
VariableSet binding_variables(const Atom& atom);

/// Variables occurring inside arithmetic sub-terms of an atom.
VariableSet arithmetic_variables(const Atom& atom);

VariableSets variable_sets(const Rule& rule);

/// A variable is safe when it is bound by a positive atom, or assigned by an
/// equality `X = t` whose right-hand side only uses safe variables.
/// Anonymous variables outside positive atoms are reported as `_`.
SafetyReport safety_check(const Rule& rule);

/// Gives every anonymous variable a unique name `_1`, `_2`, ... in order of
/// occurrence. Names starting with `_` cannot be written in source text.
Rule name_anonymous_variables(const Rule& rule);

/// True for the reserved names produced by name_anonymous_variables.
bool is_internal_anonymous(const std::string& variable);

/// The order in which the grounder visits body literals.
///
/// Filters (comparisons whose variables are all bound, negative literals)
/// run as soon as they are ready; otherwise the textually first literal that
/// can be evaluated is taken. For a rule whose arithmetic never depends on a
/// later literal this is exactly the textual order of the positive atoms.
std::vector<std::size_t> evaluation_order(const Rule& rule);

const char* to_string(ArithOp op);
const char* to_string(CmpOp op);

}  // namespace smartground
