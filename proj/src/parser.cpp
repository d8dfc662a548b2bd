#include "smartground/parser.hpp"

#include <cctype>
#include <limits>
#include <optional>
#include <sstream>

namespace smartground {

namespace {

enum class Tok {
    End, Ident, Variable, Anonymous, Number,
    LParen, RParen, Comma, Dot, DotDot, If, Bar,
    Plus, Minus, Star, Slash,
    Eq, Ne, Lt, Le, Gt, Ge,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    SourceSpan span;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_blank();
        Token tok;
        tok.span = here();
        if (pos_ >= src_.size()) {
            tok.kind = Tok::End;
            return tok;
        }
        const char c = src_[pos_];
        if (std::islower(static_cast<unsigned char>(c))) {
            tok.kind = Tok::Ident;
            tok.text = word();
        } else if (std::isupper(static_cast<unsigned char>(c))) {
            tok.kind = Tok::Variable;
            tok.text = word();
        } else if (c == '_') {
            advance();
            if (pos_ < src_.size() && is_word_char(src_[pos_]))
                throw SyntaxError(tok.span, "variable names must start with an uppercase letter");
            tok.kind = Tok::Anonymous;
            tok.text = "_";
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            tok.kind = Tok::Number;
            tok.text = number(tok.span, tok.value);
        } else {
            punct(tok);
        }
        tok.span.end = pos_;
        return tok;
    }

private:
    static bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    SourceSpan here() const { return SourceSpan{pos_, pos_, line_, col_}; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '%') {
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                    const SourceSpan start = here();
                    advance();
                    advance();
                    bool closed = false;
                    while (pos_ < src_.size()) {
                        if (src_[pos_] == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '%') {
                            advance();
                            advance();
                            closed = true;
                            break;
                        }
                        advance();
                    }
                    if (!closed) throw SyntaxError(start, "unterminated block comment");
                } else {
                    while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                }
            } else {
                break;
            }
        }
    }

    std::string word() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_word_char(src_[pos_])) advance();
        return std::string(src_.substr(start, pos_ - start));
    }

    std::string number(const SourceSpan& span, std::int64_t& value) {
        const std::size_t start = pos_;
        value = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            const int digit = src_[pos_] - '0';
            if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10)
                throw SyntaxError(span, "integer literal out of range");
            value = value * 10 + digit;
            advance();
        }
        return std::string(src_.substr(start, pos_ - start));
    }

    bool peek_is(char c, std::size_t offset = 1) const {
        return pos_ + offset < src_.size() && src_[pos_ + offset] == c;
    }

    void punct(Token& tok) {
        const char c = src_[pos_];
        auto take = [&](Tok kind, std::size_t len) {
            tok.kind = kind;
            tok.text = std::string(src_.substr(pos_, len));
            for (std::size_t i = 0; i < len; ++i) advance();
        };
        switch (c) {
        case '(': take(Tok::LParen, 1); return;
        case ')': take(Tok::RParen, 1); return;
        case ',': take(Tok::Comma, 1); return;
        case '|': take(Tok::Bar, 1); return;
        case '+': take(Tok::Plus, 1); return;
        case '-': take(Tok::Minus, 1); return;
        case '*': take(Tok::Star, 1); return;
        case '/': take(Tok::Slash, 1); return;
        case '=': take(Tok::Eq, 1); return;
        case '.':
            if (peek_is('.')) take(Tok::DotDot, 2);
            else take(Tok::Dot, 1);
            return;
        case ':':
            if (peek_is('-')) { take(Tok::If, 2); return; }
            if (peek_is('~')) throw UnsupportedFeature(tok.span, "weak constraint");
            throw UnsupportedFeature(tok.span, "conditional literal");
        case '!':
            if (peek_is('=')) { take(Tok::Ne, 2); return; }
            break;
        case '<':
            if (peek_is('=')) take(Tok::Le, 2);
            else if (peek_is('>')) take(Tok::Ne, 2);
            else take(Tok::Lt, 1);
            return;
        case '>':
            if (peek_is('=')) take(Tok::Ge, 2);
            else take(Tok::Gt, 1);
            return;
        case '#': throw UnsupportedFeature(tok.span, "aggregate or directive");
        case '{':
        case '}': throw UnsupportedFeature(tok.span, "choice rule");
        case '?': throw UnsupportedFeature(tok.span, "query");
        case '"': throw UnsupportedFeature(tok.span, "string constant");
        case ';': throw UnsupportedFeature(tok.span, "';' separator");
        case '@': throw UnsupportedFeature(tok.span, "weak constraint weight");
        default: break;
        }
        throw SyntaxError(tok.span, std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) {
        current_ = lexer_.next();
        lookahead_ = lexer_.next();
    }

    Program program() {
        Program prog;
        while (current_.kind != Tok::End) prog.rules.push_back(statement());
        return prog;
    }

private:
    void shift() {
        current_ = std::move(lookahead_);
        lookahead_ = current_.kind == Tok::End ? current_ : lexer_.next();
    }

    bool at(Tok kind) const { return current_.kind == kind; }
    bool at_keyword(const char* word) const { return current_.kind == Tok::Ident && current_.text == word; }

    [[noreturn]] void fail(const std::string& what) const {
        if (at(Tok::End)) throw SyntaxError(current_.span, "unexpected end of input, expected " + what);
        throw SyntaxError(current_.span, "unexpected '" + current_.text + "', expected " + what);
    }

    void expect(Tok kind, const char* what) {
        if (!at(kind)) fail(what);
        shift();
    }

    Rule statement() {
        const SourceSpan start = current_.span;
        Rule rule;
        if (at(Tok::If)) {
            shift();
            rule.body = body();
        } else {
            rule.head.push_back(head_atom());
            while (at(Tok::Bar)) {
                shift();
                rule.head.push_back(head_atom());
            }
            if (at(Tok::If)) {
                shift();
                rule.body = body();
            }
        }
        expect(Tok::Dot, "'.'");
        check_intervals(rule, start);
        return rule;
    }

    static void check_intervals(const Rule& rule, const SourceSpan& where) {
        bool uses = false;
        for (const auto& h : rule.head)
            for (const auto& t : h.args) uses |= t.contains_interval();
        for (const auto& l : rule.body) {
            if (l.is_comparison()) uses |= l.lhs.contains_interval() || l.rhs.contains_interval();
            else
                for (const auto& t : l.atom.args) uses |= t.contains_interval();
        }
        if (uses && !rule.is_fact()) throw SyntaxError(where, "interval terms are only allowed in facts");
    }

    std::vector<Literal> body() {
        std::vector<Literal> lits;
        if (at(Tok::Dot)) return lits;
        lits.push_back(literal());
        while (at(Tok::Comma)) {
            shift();
            lits.push_back(literal());
        }
        return lits;
    }

    Atom head_atom() {
        if (at(Tok::Minus) && lookahead_.kind == Tok::Ident)
            throw UnsupportedFeature(current_.span, "classical negation");
        if (!at(Tok::Ident) || at_keyword("not")) fail("an atom");
        return atom();
    }

    Atom atom() {
        Atom a;
        a.predicate = current_.text;
        shift();
        if (at(Tok::LParen)) {
            shift();
            a.args = terms();
            expect(Tok::RParen, "')'");
        }
        return a;
    }

    Literal literal() {
        if (at_keyword("not")) {
            shift();
            if (at_keyword("not")) throw UnsupportedFeature(current_.span, "double negation");
            return Literal::negated(head_atom());
        }
        if (at(Tok::Minus) && lookahead_.kind == Tok::Ident)
            throw UnsupportedFeature(current_.span, "classical negation");

        const SourceSpan start = current_.span;
        Term lhs = term();
        if (auto op = comparison_op()) {
            shift();
            Term rhs = term();
            return Literal::comparison(*op, std::move(lhs), std::move(rhs));
        }
        if (lhs.kind == Term::Kind::Symbol) return Literal::positive(Atom{lhs.name, {}});
        if (lhs.kind == Term::Kind::Function) return Literal::positive(Atom{lhs.name, std::move(lhs.args)});
        throw SyntaxError(start, "expected an atom or a comparison");
    }

    std::optional<CmpOp> comparison_op() const {
        switch (current_.kind) {
        case Tok::Eq: return CmpOp::Eq;
        case Tok::Ne: return CmpOp::Ne;
        case Tok::Lt: return CmpOp::Lt;
        case Tok::Le: return CmpOp::Le;
        case Tok::Gt: return CmpOp::Gt;
        case Tok::Ge: return CmpOp::Ge;
        default: return std::nullopt;
        }
    }

    std::vector<Term> terms() {
        std::vector<Term> out;
        out.push_back(term());
        while (at(Tok::Comma)) {
            shift();
            out.push_back(term());
        }
        return out;
    }

    Term arithmetic(ArithOp op, Term lhs, Term rhs, const SourceSpan& where) {
        auto ok = [](const Term& t) {
            return t.kind == Term::Kind::Integer || t.kind == Term::Kind::Variable ||
                   t.kind == Term::Kind::Anonymous || t.kind == Term::Kind::Arithmetic;
        };
        if (!ok(lhs) || !ok(rhs)) throw SyntaxError(where, "arithmetic operands must be integers or variables");
        return Term::arithmetic(op, std::move(lhs), std::move(rhs));
    }

    Term term() {
        Term lhs = product();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            const SourceSpan where = current_.span;
            const ArithOp op = at(Tok::Plus) ? ArithOp::Add : ArithOp::Sub;
            shift();
            lhs = arithmetic(op, std::move(lhs), product(), where);
        }
        return lhs;
    }

    Term product() {
        Term lhs = unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            const SourceSpan where = current_.span;
            const ArithOp op = at(Tok::Star) ? ArithOp::Mul : ArithOp::Div;
            shift();
            lhs = arithmetic(op, std::move(lhs), unary(), where);
        }
        return lhs;
    }

    std::int64_t signed_integer() {
        bool negative = false;
        if (at(Tok::Minus)) {
            negative = true;
            shift();
        }
        if (!at(Tok::Number)) fail("an integer");
        const std::int64_t v = current_.value;
        shift();
        return negative ? -v : v;
    }

    Term number_or_interval(bool negative) {
        const SourceSpan start = current_.span;
        std::int64_t lo = current_.value;
        if (negative) lo = -lo;
        shift();
        if (!at(Tok::DotDot)) return Term::integer(lo);
        shift();
        const std::int64_t hi = signed_integer();
        if (lo > hi) throw SyntaxError(start, "empty interval");
        return Term::interval(lo, hi);
    }

    Term unary() {
        if (at(Tok::Minus)) {
            const SourceSpan where = current_.span;
            shift();
            if (at(Tok::Number)) return number_or_interval(true);
            Term inner = unary();
            return arithmetic(ArithOp::Sub, Term::integer(0), std::move(inner), where);
        }
        return primary();
    }

    Term primary() {
        switch (current_.kind) {
        case Tok::Number:
            return number_or_interval(false);
        case Tok::Variable: {
            Term t = Term::variable(current_.text);
            shift();
            return t;
        }
        case Tok::Anonymous:
            shift();
            return Term::anonymous();
        case Tok::Ident: {
            if (at_keyword("not")) fail("a term");
            std::string name = current_.text;
            shift();
            if (!at(Tok::LParen)) return Term::symbol(std::move(name));
            shift();
            auto args = terms();
            expect(Tok::RParen, "')'");
            return Term::function(std::move(name), std::move(args));
        }
        case Tok::LParen: {
            shift();
            Term inner = term();
            if (at(Tok::Comma)) throw UnsupportedFeature(current_.span, "tuple term");
            expect(Tok::RParen, "')'");
            return inner;
        }
        default:
            fail("a term");
        }
    }

    Lexer lexer_;
    Token current_;
    Token lookahead_;
};

int precedence(ArithOp op) { return (op == ArithOp::Add || op == ArithOp::Sub) ? 1 : 2; }

void render_into(const Term& t, std::ostringstream& out);

void render_operand(const Term& t, int parent_prec, bool right, std::ostringstream& out) {
    bool paren = false;
    if (t.kind == Term::Kind::Arithmetic) {
        const int p = precedence(t.op);
        paren = right ? p <= parent_prec : p < parent_prec;
    } else if (t.kind == Term::Kind::Integer && t.number < 0 && right) {
        paren = true;
    }
    if (paren) out << '(';
    render_into(t, out);
    if (paren) out << ')';
}

void render_into(const Term& t, std::ostringstream& out) {
    switch (t.kind) {
    case Term::Kind::Integer:
        out << t.number;
        break;
    case Term::Kind::Symbol:
        out << t.name;
        break;
    case Term::Kind::Variable:
        out << (is_internal_anonymous(t.name) ? "_" : t.name);
        break;
    case Term::Kind::Anonymous:
        out << '_';
        break;
    case Term::Kind::Function:
        out << t.name << '(';
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i) out << ',';
            render_into(t.args[i], out);
        }
        out << ')';
        break;
    case Term::Kind::Arithmetic:
        render_operand(t.args[0], precedence(t.op), false, out);
        out << to_string(t.op);
        render_operand(t.args[1], precedence(t.op), true, out);
        break;
    case Term::Kind::Interval:
        out << t.number << ".." << t.upper;
        break;
    }
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).program(); }

std::string render_term(const Term& term) {
    std::ostringstream out;
    render_into(term, out);
    return out.str();
}

std::string render_atom(const Atom& atom) {
    std::ostringstream out;
    out << atom.predicate;
    if (!atom.args.empty()) {
        out << '(';
        for (std::size_t i = 0; i < atom.args.size(); ++i) {
            if (i) out << ',';
            render_into(atom.args[i], out);
        }
        out << ')';
    }
    return out.str();
}

std::string render_literal(const Literal& literal) {
    if (literal.is_comparison())
        return render_term(literal.lhs) + to_string(literal.cmp) + render_term(literal.rhs);
    return (literal.negative ? "not " : "") + render_atom(literal.atom);
}

std::string render_rule(const Rule& rule) {
    std::string out;
    for (std::size_t i = 0; i < rule.head.size(); ++i) {
        if (i) out += " | ";
        out += render_atom(rule.head[i]);
    }
    if (!rule.body.empty() || rule.head.empty()) {
        out += rule.head.empty() ? ":- " : " :- ";
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            if (i) out += ", ";
            out += render_literal(rule.body[i]);
        }
    }
    if (rule.head.empty() && rule.body.empty()) out.pop_back();
    out += '.';
    return out;
}

std::string render_program(const Program& program) {
    std::string out;
    for (const auto& r : program.rules) {
        out += render_rule(r);
        out += '\n';
    }
    return out;
}

}  // namespace smartground
