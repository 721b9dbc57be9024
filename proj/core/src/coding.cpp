#include "oag/coding.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

#include "oag/errors.hpp"

namespace oag {

// ---------------------------------------------------------------- values

CodeValue CodeValue::of(Element e) {
    CodeValue v;
    v.sort = Sort::Main;
    v.main = std::move(e);
    return v;
}

CodeValue CodeValue::of(QuotientElement q) {
    CodeValue v;
    v.sort = Sort::Quot;
    v.quot = std::move(q);
    return v;
}

CodeValue CodeValue::of(FiniteQuotientElement f) {
    CodeValue v;
    v.sort = Sort::FinQuot;
    v.fin = std::move(f);
    return v;
}

CodeValue CodeValue::of(Marker m) {
    CodeValue v;
    v.sort = Sort::Mark;
    v.marker = m;
    return v;
}

namespace {

const char* marker_name(Marker m) {
    switch (m) {
        case Marker::PlusInf: return "PlusInf";
        case Marker::MinusInf: return "MinusInf";
        case Marker::Empty: return "Empty";
        case Marker::WholeGroup: return "WholeGroup";
    }
    return "?";
}

Marker marker_from(const std::string& s) {
    for (Marker m : {Marker::PlusInf, Marker::MinusInf, Marker::Empty, Marker::WholeGroup})
        if (s == marker_name(m)) return m;
    throw DomainError("unknown marker " + s);
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

}  // namespace

std::string CodeValue::str() const {
    switch (sort) {
        case Sort::Main: return "MainVal" + main.str();
        case Sort::Quot: return "QuotVal" + quot.str();
        case Sort::FinQuot: return "FinQuotVal" + fin.str();
        case Sort::Mark: return std::string("Marker(") + marker_name(marker) + ")";
    }
    return "?";
}

std::string Code::str() const {
    std::string s = "Code<" + header + ">[";
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "; " : "") + values[i].str();
    return s + "]";
}

std::string to_json(const Code& c) {
    using json = nlohmann::ordered_json;
    json vals = json::array();
    auto rats = [](const std::vector<Rational>& v) {
        json a = json::array();
        for (const auto& r : v) a.push_back(r.str());
        return a;
    };
    for (const auto& v : c.values) {
        json j;
        switch (v.sort) {
            case CodeValue::Sort::Main:
                j["sort"] = "main";
                j["coords"] = rats(v.main.coords);
                break;
            case CodeValue::Sort::Quot:
                j["sort"] = "quot";
                j["level"] = v.quot.level;
                j["coords"] = rats(v.quot.coords);
                break;
            case CodeValue::Sort::FinQuot:
                j["sort"] = "finquot";
                j["level"] = v.fin.level;
                j["modulus"] = v.fin.modulus;
                j["residues"] = v.fin.residues;
                break;
            case CodeValue::Sort::Mark:
                j["sort"] = "marker";
                j["marker"] = marker_name(v.marker);
                break;
        }
        vals.push_back(std::move(j));
    }
    json out;
    out["version"] = "code-v1";
    out["header"] = c.header;
    out["values"] = std::move(vals);
    return out.dump();
}

Code code_from_json(const std::string& text) {
    using json = nlohmann::json;
    Code c;
    try {
        json j = json::parse(text);
        if (j.at("version") != "code-v1") throw DomainError("unsupported code version");
        c.header = j.at("header").get<std::string>();
        for (const auto& v : j.at("values")) {
            std::string sort = v.at("sort").get<std::string>();
            auto rats = [&] {
                std::vector<Rational> out;
                for (const auto& r : v.at("coords")) out.push_back(Rational::parse(r.get<std::string>()));
                return out;
            };
            if (sort == "main")
                c.values.push_back(CodeValue::of(Element(rats())));
            else if (sort == "quot")
                c.values.push_back(CodeValue::of(QuotientElement{v.at("level").get<int>(), rats()}));
            else if (sort == "finquot")
                c.values.push_back(CodeValue::of(FiniteQuotientElement{
                    v.at("level").get<int>(), v.at("modulus").get<Int>(), v.at("residues").get<std::vector<Int>>()}));
            else if (sort == "marker")
                c.values.push_back(CodeValue::of(marker_from(v.at("marker").get<std::string>())));
            else
                throw DomainError("unknown value sort " + sort);
        }
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed code: ") + e.what());
    }
    return c;
}

// ---------------------------------------------------------------- segments

namespace {

CodeValue quotient_value(const GroupSpec& g, int level, const Element& beta) {
    if (level == g.rank()) return CodeValue::of(beta);
    return CodeValue::of(project(g, level, beta));
}

// Token and value for a canonical (n = 1) segment. `whole` is the marker used
// for the whole group in this position.
std::string encode(const GroupSpec& g, const DivSegment& s, Marker whole, std::vector<CodeValue>& out) {
    bool is_whole = s.is_whole(), is_empty = s.is_empty();
    if (!is_whole && !is_empty && s.level == 0) {
        // rho_0 identifies everything
        bool holds = !s.strict;
        is_whole = holds;
        is_empty = !holds;
    }
    if (is_whole) {
        out.push_back(CodeValue::of(whole));
        return "whole";
    }
    if (is_empty) {
        out.push_back(CodeValue::of(Marker::Empty));
        return "empty";
    }
    if (s.n != 1) throw DomainError("segment is not in canonical form (n != 1)");
    const int k = s.level;
    Element b = lift(g, project(g, k, s.beta));
    const bool discrete = g.kind(k) == Kind::DiscreteZ;
    if (s.direction == Direction::End) {
        if (discrete) {
            if (s.strict) b = b + Element::unit(g, k);
            out.push_back(quotient_value(g, k, b));
            return "end.min";
        }
        out.push_back(quotient_value(g, k, b));
        return s.strict ? "end.gt" : "end.ge";
    }
    // initial segment: code its complement
    if (discrete) {
        if (!s.strict) b = b + Element::unit(g, k);
        out.push_back(quotient_value(g, k, b));
        return "init.min";
    }
    out.push_back(quotient_value(g, k, b));
    return s.strict ? "init.ge" : "init.gt";
}

DivSegment decode(const GroupSpec& g, const std::string& tok, const CodeValue& v, bool initial_slot) {
    const Element zero = Element::zero(g);
    if (tok == "whole") {
        if (v.sort != CodeValue::Sort::Mark) throw DomainError("malformed code: expected a marker");
        return initial_slot ? DivSegment{Direction::Initial, 1, 0, Bound::PlusInf, zero, false}
                            : DivSegment{Direction::End, 1, 0, Bound::MinusInf, zero, false};
    }
    if (tok == "empty") {
        if (v.sort != CodeValue::Sort::Mark || v.marker != Marker::Empty) throw DomainError("malformed code: expected Empty");
        return initial_slot ? DivSegment{Direction::Initial, 1, 0, Bound::MinusInf, zero, false}
                            : DivSegment{Direction::End, 1, 0, Bound::PlusInf, zero, false};
    }
    int level;
    Element beta;
    if (v.sort == CodeValue::Sort::Main) {
        check_element(g, v.main);
        level = g.rank();
        beta = v.main;
    } else if (v.sort == CodeValue::Sort::Quot) {
        level = v.quot.level;
        if (level < 1 || level > g.rank() || static_cast<int>(v.quot.coords.size()) != level)
            throw DomainError("malformed code: bad quotient value");
        beta = lift(g, v.quot);
        check_element(g, beta);
    } else {
        throw DomainError("malformed code: expected a group or quotient value");
    }
    DivSegment s{Direction::End, 1, level, Bound::Finite, beta, false};
    if (tok == "end.min" || tok == "end.ge") return s;
    if (tok == "end.gt") {
        s.strict = true;
        return s;
    }
    s.direction = Direction::Initial;
    if (tok == "init.min" || tok == "init.ge") {
        s.strict = true;
        return s;
    }
    if (tok == "init.gt") return s;
    throw DomainError("malformed code: unknown segment token " + tok);
}

}  // namespace

Code code_segment(const GroupSpec& g, const DivSegment& seg, const QeOptions& opts) {
    DivSegment s = seg;
    if (s.bound == Bound::Finite && s.n != 1) s = to_div_segment(g, to_formula(g, seg), opts);
    Code c;
    c.header = "seg " + encode(g, s, Marker::WholeGroup, c.values);
    return c;
}

Code code_set(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    auto sets = nice_decompose(g, phi, opts);
    Code c;
    if (sets.empty()) {
        c.header = "set 0";
        c.values.push_back(CodeValue::of(Marker::Empty));
        return c;
    }
    c.header = "set " + std::to_string(sets.size());
    for (const auto& s : sets) {
        c.header += " " + encode(g, s.upper, Marker::MinusInf, c.values);
        c.header += " " + encode(g, s.lower, Marker::PlusInf, c.values);
        std::string signs;
        for (const auto& l : s.congr) {
            if (l.z != 1 || l.offset != 0) throw DomainError("congruence literal is not in canonical form");
            signs += l.positive ? '+' : '-';
            c.values.push_back(CodeValue::of(project_fin(g, l.level, l.modulus, l.beta)));
        }
        c.header += " " + (signs.empty() ? std::string("_") : signs);
    }
    return c;
}

// ---------------------------------------------------------------- types

bool residues_coherent(const GroupSpec& g, const TypeDescriptor& p) {
    const int n = g.rank();
    for (const auto& [key, f] : p.residues) {
        auto [k, l] = key;
        if (k < 0 || k > n || l < 2 || f.level != k || f.modulus != l) return false;
        if (static_cast<int>(f.residues.size()) != g.discrete_count(k)) return false;
        for (Int r : f.residues)
            if (r < 0 || r >= l) return false;
    }
    for (const auto& [a, fa] : p.residues)
        for (const auto& [b, fb] : p.residues) {
            if (b.first > a.first || a.second % b.second != 0) continue;
            for (std::size_t i = 0; i < fb.residues.size(); ++i)
                if (mod_floor(fa.residues[i], b.second) != fb.residues[i]) return false;
        }
    std::optional<QuotientElement> finer;
    for (int k = n; k >= 1; --k) {
        if (static_cast<std::size_t>(k) >= p.coset.size() || !p.coset[static_cast<std::size_t>(k)]) {
            if (finer) return false;  // a fixed coset fixes every coarser one
            continue;
        }
        const auto& q = *p.coset[static_cast<std::size_t>(k)];
        if (q.level != k || static_cast<int>(q.coords.size()) != k) return false;
        for (int i = 1; i <= k; ++i)
            if (g.kind(i) == Kind::DiscreteZ && !q.coords[static_cast<std::size_t>(i - 1)].is_integer()) return false;
        if (finer && !std::equal(q.coords.begin(), q.coords.end(), finer->coords.begin())) return false;
        if (!finer) finer = q;
    }
    if (finer) {
        Element e = lift(g, *finer);
        for (const auto& [key, f] : p.residues)
            if (key.first <= finer->level && project_fin(g, key.first, key.second, e) != f) return false;
    }
    return true;
}

FormulaPtr type_constraints(const GroupSpec& g, const TypeDescriptor& p, const std::string& var) {
    std::vector<FormulaPtr> parts;
    Term x = Term::var(g, var);
    for (std::size_t k = 1; k < p.coset.size(); ++k)
        if (p.coset[k]) parts.push_back(f_atom(Atom::rel_eq(static_cast<int>(k), x, Term::constant_of(lift(g, *p.coset[k])))));
    for (const auto& [key, f] : p.residues) {
        if (key.first == 0) continue;
        Term b = Term::constant_of(lift(g, f));
        parts.push_back(key.first == g.rank() ? f_atom(Atom::congr(key.second, x, b))
                                              : f_atom(Atom::rel_congr(key.first, key.second, x, b)));
    }
    return f_and(std::move(parts));
}

Code code_type(const GroupSpec& g, const TypeDescriptor& p) {
    if (p.cut != CutKind::Realized && !residues_coherent(g, p)) throw DomainError("incoherent type descriptor");
    Code c;
    if (p.cut == CutKind::Realized) {
        check_element(g, p.realized);
        c.header = "type realized";
        c.values.push_back(CodeValue::of(p.realized));
        return c;
    }
    c.header = "type L=" + std::to_string(p.residue_bound);
    switch (p.cut) {
        case CutKind::MinusInf:
            c.header += " minf";
            c.values.push_back(CodeValue::of(Marker::MinusInf));
            break;
        case CutKind::PlusInf:
            c.header += " pinf";
            c.values.push_back(CodeValue::of(Marker::PlusInf));
            break;
        default:
            if (p.segment.direction != Direction::End) throw DomainError("type cut must be an end-segment");
            c.header += " at:" + encode(g, p.segment, Marker::WholeGroup, c.values);
    }
    for (const auto& [key, f] : p.residues) {
        c.header += " r" + std::to_string(key.first) + "/" + std::to_string(key.second);
        c.values.push_back(CodeValue::of(f));
    }
    for (std::size_t k = 1; k < p.coset.size(); ++k)
        if (p.coset[k]) {
            c.header += " c" + std::to_string(k);
            c.values.push_back(CodeValue::of(*p.coset[k]));
        }
    return c;
}

// ---------------------------------------------------------------- reconstruction

FormulaPtr reconstruct(const GroupSpec& g, const Code& c, const std::string& var) {
    auto tok = tokens(c.header);
    if (tok.empty()) throw DomainError("malformed code: empty header");
    std::size_t next = 0;
    auto value = [&]() -> const CodeValue& {
        if (next >= c.values.size()) throw DomainError("malformed code: too few values");
        return c.values[next++];
    };
    auto done = [&](FormulaPtr f) {
        if (next != c.values.size()) throw DomainError("malformed code: too many values");
        return f;
    };
    if (tok[0] == "seg") {
        if (tok.size() != 2) throw DomainError("malformed code header");
        const CodeValue& v = value();
        bool initial = tok[1].rfind("init", 0) == 0;
        if (tok[1] == "whole" && v.marker != Marker::WholeGroup) throw DomainError("malformed code: expected WholeGroup");
        return done(to_formula(g, decode(g, tok[1], v, initial), var));
    }
    if (tok[0] == "set") {
        if (tok.size() < 2) throw DomainError("malformed code header");
        std::size_t count = std::stoul(tok[1]);
        if (count == 0) {
            const CodeValue& v = value();
            if (v.sort != CodeValue::Sort::Mark || v.marker != Marker::Empty) throw DomainError("malformed code");
            return done(f_false());
        }
        if (tok.size() != 2 + 3 * count) throw DomainError("malformed code header");
        std::vector<NiceSet> sets;
        for (std::size_t i = 0; i < count; ++i) {
            NiceSet s;
            s.upper = decode(g, tok[2 + 3 * i], value(), false);
            s.lower = decode(g, tok[3 + 3 * i], value(), true);
            if (s.upper.direction != Direction::End || s.lower.direction != Direction::Initial)
                throw DomainError("malformed code: segment direction");
            const std::string& signs = tok[4 + 3 * i];
            if (signs != "_")
                for (char ch : signs) {
                    const CodeValue& v = value();
                    if (v.sort != CodeValue::Sort::FinQuot || (ch != '+' && ch != '-'))
                        throw DomainError("malformed code: congruence literal");
                    s.congr.push_back(CongruenceLiteral{ch == '+', 1, v.fin.level, v.fin.modulus, lift(g, v.fin), 0});
                }
            sets.push_back(std::move(s));
        }
        return done(to_formula(g, sets, var));
    }
    if (tok[0] == "type") {
        if (tok.size() == 2 && tok[1] == "realized") {
            const CodeValue& v = value();
            if (v.sort != CodeValue::Sort::Main) throw DomainError("malformed code: expected a group value");
            check_element(g, v.main);
            return done(f_eq(Term::var(g, var), Term::constant_of(v.main)));
        }
        TypeDescriptor p;
        p.coset.assign(static_cast<std::size_t>(g.rank()) + 1, std::nullopt);
        std::vector<FormulaPtr> parts;
        for (std::size_t i = 1; i < tok.size(); ++i) {
            const std::string& t = tok[i];
            if (t.rfind("L=", 0) == 0) continue;
            if (t == "minf" || t == "pinf") {
                value();
            } else if (t.rfind("at:", 0) == 0) {
                parts.push_back(to_formula(g, decode(g, t.substr(3), value(), false), var));
            } else if (t[0] == 'r') {
                const CodeValue& v = value();
                if (v.sort != CodeValue::Sort::FinQuot) throw DomainError("malformed code: residue");
                p.residues[{v.fin.level, v.fin.modulus}] = v.fin;
            } else if (t[0] == 'c') {
                const CodeValue& v = value();
                if (v.sort != CodeValue::Sort::Quot || v.quot.level < 1 || v.quot.level > g.rank())
                    throw DomainError("malformed code: coset");
                p.coset[static_cast<std::size_t>(v.quot.level)] = v.quot;
            } else {
                throw DomainError("malformed code header token " + t);
            }
        }
        parts.push_back(type_constraints(g, p, var));
        return done(f_and(std::move(parts)));
    }
    throw DomainError("code does not describe a unary set: " + tok[0]);
}

// ---------------------------------------------------------------- finite sets

Code code_finite_set(const GroupSpec& g, const std::vector<std::vector<QuotientElement>>& tuples) {
    if (tuples.empty()) throw DomainError("empty finite set");
    const auto& shape = tuples.front();
    for (const auto& t : tuples) {
        if (t.size() != shape.size()) throw DomainError("tuples of different lengths");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i].level != shape[i].level) throw DomainError("tuples of different shapes");
            if (t[i].level < 0 || t[i].level > g.rank() || static_cast<int>(t[i].coords.size()) != t[i].level)
                throw DomainError("malformed quotient element " + t[i].str());
            check_element(g, lift(g, t[i]));
        }
    }
    std::set<std::vector<QuotientElement>> sorted(tuples.begin(), tuples.end());
    Code c;
    c.header = "fin " + std::to_string(sorted.size()) + " " + std::to_string(shape.size());
    for (const auto& q : shape) c.header += " " + std::to_string(q.level);
    for (const auto& t : sorted)
        for (const auto& q : t) c.values.push_back(CodeValue::of(q));
    return c;
}

std::vector<FiniteQuotientElement> enumerate_finite_quotient(const GroupSpec& g, int level, Int modulus) {
    std::set<FiniteQuotientElement> out;
    for (const auto& r : representatives_mod(g, level, modulus)) out.insert(project_fin(g, level, modulus, r));
    return {out.begin(), out.end()};
}

}  // namespace oag
