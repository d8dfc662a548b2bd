#include "support.hpp"

#include <algorithm>
#include <map>
#include <regex>

namespace smartground::fixtures {

namespace {

std::string var_name(std::size_t i) { return std::string(1, static_cast<char>('A' + i)); }

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Atom atom_over(const std::string& pred, const std::vector<std::string>& vars) {
    Atom a{pred, {}};
    for (const auto& v : vars) a.args.push_back(Term::variable(v));
    return a;
}

}  // namespace

Rule random_rule(std::mt19937_64& rng) {
    const std::size_t nvars = pick(rng, 2, 8);
    const std::size_t nbody = pick(rng, 3, 10);
    Rule r;
    std::vector<bool> used(nvars, false);
    for (std::size_t i = 0; i < nbody; ++i) {
        const std::size_t arity = pick(rng, 1, 3);
        std::vector<std::string> args;
        for (std::size_t j = 0; j < arity; ++j) {
            // every variable shows up at least once once the body is long enough
            std::size_t v = pick(rng, 0, nvars - 1);
            if (i * 3 + j < nvars && !used[i * 3 + j]) v = i * 3 + j;
            used[v] = true;
            args.push_back(var_name(v));
        }
        r.body.push_back(Literal::positive(atom_over("q" + std::to_string(i % 4) + "_" + std::to_string(arity), args)));
    }
    std::vector<std::string> bound;
    for (std::size_t v = 0; v < nvars; ++v)
        if (used[v]) bound.push_back(var_name(v));
    if (bound.size() >= 2 && pick(rng, 0, 2) == 0)
        r.body.push_back(Literal::comparison(CmpOp::Ne, Term::variable(bound[0]), Term::variable(bound[1])));
    std::vector<std::string> head;
    for (const auto& v : bound)
        if (pick(rng, 0, 2) == 0) head.push_back(v);
    r.head.push_back(atom_over("h", head));
    return r;
}

Program random_stratified_program(std::mt19937_64& rng) {
    for (;;) {
        Program p;
        const std::size_t nconst = pick(rng, 2, 3);
        std::size_t atoms = 0;
        // edb: e/2 and b/1
        std::vector<std::pair<std::string, std::size_t>> preds;
        for (std::size_t x = 1; x <= nconst; ++x)
            if (pick(rng, 0, 1)) {
                p.rules.push_back(Rule{{Atom{"b", {Term::integer(static_cast<std::int64_t>(x))}}}, {}});
                ++atoms;
            }
        const std::size_t nedges = pick(rng, 1, 5);
        for (std::size_t i = 0; i < nedges; ++i) {
            const auto x = static_cast<std::int64_t>(pick(rng, 1, nconst));
            const auto y = static_cast<std::int64_t>(pick(rng, 1, nconst));
            Rule f{{Atom{"e", {Term::integer(x), Term::integer(y)}}}, {}};
            if (std::find(p.rules.begin(), p.rules.end(), f) == p.rules.end()) {
                p.rules.push_back(f);
                ++atoms;
            }
        }
        preds.emplace_back("b", 1);
        preds.emplace_back("e", 2);
        const std::size_t nidb = pick(rng, 2, 4);
        std::vector<std::pair<std::string, std::size_t>> idb;
        for (std::size_t i = 0; i < nidb; ++i) {
            const std::size_t arity = pick(rng, 1, 2);
            idb.emplace_back("p" + std::to_string(i), arity);
            atoms += arity == 1 ? nconst : nconst * nconst;
        }
        if (atoms > 20) continue;

        const std::size_t nrules = pick(rng, 2, 8);
        for (std::size_t ri = 0; ri < nrules; ++ri) {
            const std::size_t level = ri < nidb ? ri : pick(rng, 0, nidb - 1);
            const auto& [hname, harity] = idb[level];
            const std::size_t nvars = pick(rng, 2, 4);
            const std::size_t npos = pick(rng, 1, 4);
            Rule r;
            std::vector<bool> used(nvars, false);
            for (std::size_t i = 0; i < npos; ++i) {
                // positive: edb, lower strata, or the head predicate itself
                std::vector<std::pair<std::string, std::size_t>> choices = preds;
                for (std::size_t j = 0; j <= level; ++j) choices.push_back(idb[j]);
                const auto& [name, arity] = choices[pick(rng, 0, choices.size() - 1)];
                std::vector<std::string> args;
                for (std::size_t j = 0; j < arity; ++j) {
                    std::size_t v = pick(rng, 0, nvars - 1);
                    used[v] = true;
                    args.push_back(var_name(v));
                }
                r.body.push_back(Literal::positive(atom_over(name, args)));
            }
            std::vector<std::string> bound;
            for (std::size_t v = 0; v < nvars; ++v)
                if (used[v]) bound.push_back(var_name(v));
            if (level > 0 && pick(rng, 0, 1)) {
                const auto& [name, arity] = idb[pick(rng, 0, level - 1)];
                std::vector<std::string> args;
                for (std::size_t j = 0; j < arity; ++j) args.push_back(bound[pick(rng, 0, bound.size() - 1)]);
                r.body.push_back(Literal::negated(atom_over(name, args)));
            }
            if (bound.size() >= 2 && pick(rng, 0, 3) == 0) {
                const CmpOp op = pick(rng, 0, 1) ? CmpOp::Ne : CmpOp::Lt;
                r.body.push_back(Literal::comparison(op, Term::variable(bound[0]), Term::variable(bound[1])));
            }
            std::vector<std::string> head;
            for (std::size_t j = 0; j < harity; ++j) head.push_back(bound[pick(rng, 0, bound.size() - 1)]);
            r.head.push_back(atom_over(hname, head));
            p.rules.push_back(std::move(r));
        }
        return p;
    }
}

std::string canonical_fresh_names(const std::string& text) {
    static const std::regex fresh("fresh_pred_[0-9]+");
    std::map<std::string, std::string> names;
    std::string out;
    auto begin = std::sregex_iterator(text.begin(), text.end(), fresh);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        out += text.substr(last, static_cast<std::size_t>(m.position()) - last);
        auto [pos, inserted] = names.emplace(m.str(), "F" + std::to_string(names.size() + 1));
        out += pos->second;
        last = static_cast<std::size_t>(m.position() + m.length());
    }
    return out + text.substr(last);
}

std::string cross_product_program(int n) {
    std::string text = "h(X,W) :- c(Z,W), b(Y,Z), a(X,Y).\nout(X) :- h(X,W).\n";
    text += "a(1.." + std::to_string(n) + ",0). b(0,1.." + std::to_string(n) + "). c(1,1).\n";
    return text;
}

}  // namespace smartground::fixtures
