#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "oag/coding.hpp"
#include "oag/differential.hpp"
#include "oag/errors.hpp"
#include "oag/typegen.hpp"

namespace oag::cli {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kCommands = {"parse", "qe",   "decide", "equiv", "nice", "endseg",   "code",
                                            "reconstruct", "typegen", "rank", "chi", "reps", "fuzzcheck"};

struct Config {
    std::string group;
    Int n = 0;
    Int modbound = 12;
    Int box = 8;
    std::size_t budget = 4'000'000;
    std::uint64_t seed = 0;
    std::size_t count = 100;
    int level = -1;
    std::string format = "json";
    std::string file;
    std::vector<std::string> inputs;
};

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json config_json(const Config& c) {
    json j;
    j["group"] = c.group;
    j["modbound"] = c.modbound;
    j["box"] = c.box;
    j["budget"] = c.budget;
    j["seed"] = c.seed;
    return j;
}

std::string render(const json& j, const Config& c) { return c.format == "human" ? j.dump(2) : j.dump(); }

json segment_json(const DivSegment& s) {
    json j;
    j["direction"] = s.direction == Direction::End ? "end" : "initial";
    j["n"] = s.n;
    j["level"] = s.level;
    j["bound"] = s.bound == Bound::Finite ? "finite" : s.bound == Bound::MinusInf ? "-inf" : "+inf";
    j["beta"] = s.beta.str();
    j["strict"] = s.strict;
    j["text"] = describe(s);
    return j;
}

json descriptor_json(const TypeDescriptor& p) {
    json j;
    const char* cut[] = {"realized", "segment", "-inf", "+inf"};
    j["cut"] = cut[static_cast<int>(p.cut)];
    if (p.cut == CutKind::Realized) j["realized"] = p.realized.str();
    if (p.cut == CutKind::AtSegment) j["segment"] = segment_json(p.segment);
    json cosets = json::array();
    for (std::size_t k = 1; k < p.coset.size(); ++k) cosets.push_back(p.coset[k] ? json(p.coset[k]->str()) : json("generic"));
    j["cosets"] = cosets;
    json res = json::array();
    for (const auto& [key, f] : p.residues) res.push_back(f.str());
    j["residues"] = res;
    return j;
}

std::string read_file(const std::string& path, const std::string& stdin_text) {
    if (path == "-") return stdin_text;
    std::ifstream in(path);
    if (!in) throw Usage("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void need_inputs(const Config& c, std::size_t k) {
    if (c.inputs.size() != k)
        throw Usage("expected " + std::to_string(k) + " formula argument(s), got " + std::to_string(c.inputs.size()));
}

json fuzzcheck(const GroupSpec& g, const Config& c, const QeOptions& opts) {
    FuzzLimits lim;
    auto corpus = fuzz_corpus(g, c.seed, c.count, lim, g.all_discrete() ? Template::Bounded : Template::Mixed);
    Box box{c.box};
    std::vector<std::optional<Disagreement>> found(corpus.size());
    std::vector<std::string> errors(corpus.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < corpus.size();) {
            try {
                found[i] = differential_check(g, corpus[i], box, opts);
            } catch (const Error& e) {
                errors[i] = e.kind() + ": " + e.what();
            }
        }
    };
    unsigned threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    json j;
    std::size_t failures = 0, skipped = 0;
    json first = nullptr;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!errors[i].empty()) {
            ++skipped;
            continue;
        }
        if (!found[i]) continue;
        if (failures++ == 0) {
            first = json::object();
            first["formula"] = print(found[i]->formula);
            first["point"] = describe(found[i]->point);
            first["oracle"] = found[i]->oracle;
            first["eliminated"] = found[i]->eliminated;
        }
    }
    j["count"] = corpus.size();
    j["skipped"] = skipped;
    j["failures"] = failures;
    j["first_counterexample"] = first;
    return j;
}

json dispatch(const std::string& cmd, const Config& c, const QeOptions& opts) {
    if (c.group.empty()) throw Usage("--group is required");
    GroupSpec g = GroupSpec::parse(c.group);
    json j;
    auto formula = [&](std::size_t i) { return parse(g, c.inputs.at(i)); };
    if (cmd == "parse") {
        need_inputs(c, 1);
        auto f = formula(0);
        j["formula"] = print(f);
        auto fv = free_vars(f);
        j["free_vars"] = std::vector<std::string>(fv.begin(), fv.end());
    } else if (cmd == "qe") {
        need_inputs(c, 1);
        j["result"] = scalar::print(eliminate(g, formula(0), opts));
    } else if (cmd == "decide") {
        need_inputs(c, 1);
        j["result"] = decide(g, formula(0), opts);
    } else if (cmd == "equiv") {
        need_inputs(c, 2);
        j["result"] = equivalent(g, formula(0), formula(1), opts);
    } else if (cmd == "nice") {
        need_inputs(c, 1);
        auto f = formula(0);
        auto sets = nice_decompose(g, f, opts);
        json arr = json::array();
        for (const auto& s : sets) arr.push_back(describe(s));
        j["sets"] = arr;
        j["formula"] = print(to_formula(g, sets, unary_var(f)));
    } else if (cmd == "endseg") {
        need_inputs(c, 1);
        auto f = formula(0);
        bool end = is_end_segment(g, f, opts), init = is_initial_segment(g, f, opts);
        j["end_segment"] = end;
        j["initial_segment"] = init;
        if (end || init) {
            j["stabilizer"] = stabilizer(g, f, opts).level;
            auto seg = to_div_segment(g, f, opts);
            j["segment"] = segment_json(seg);
            j["code"] = json::parse(to_json(code_segment(g, seg, opts)));
        }
    } else if (cmd == "code") {
        need_inputs(c, 1);
        auto code = code_set(g, formula(0), opts);
        j["code"] = json::parse(to_json(code));
        j["text"] = code.str();
    } else if (cmd == "reconstruct") {
        need_inputs(c, 1);
        j["formula"] = print(reconstruct(g, code_from_json(c.inputs[0])));
    } else if (cmd == "typegen") {
        need_inputs(c, 1);
        auto f = formula(0);
        auto p = generic_type(g, f, c.modbound, opts);
        j["descriptor"] = descriptor_json(p);
        j["code"] = json::parse(to_json(code_type(g, p)));
        j["check"] = check_descriptor(g, p, f, opts);
    } else if (cmd == "rank") {
        if (c.n < 1) throw Usage("rank needs --n >= 1");
        auto rj = compute_rj(g, c.n);
        j["n"] = c.n;
        j["rank"] = rj.size();
        json levels = json::array();
        for (const auto& d : rj) levels.push_back(d.level);
        j["levels"] = levels;
        json spot = json::array();
        for (int i = 1; i <= g.rank(); ++i) {
            Element e = Element::unit(g, i);
            json row;
            row["element"] = e.str();
            row["A"] = schmitt_An(g, e, c.n).level;
            row["B"] = schmitt_Bn(g, e, c.n).level;
            spot.push_back(row);
        }
        j["spot"] = spot;
    } else if (cmd == "chi") {
        if (c.n < 2) throw Usage("chi needs --n p with p prime");
        auto chi = compute_chi(g, c.n);
        j["p"] = c.n;
        j["chi"] = chi ? json(*chi) : json("infinite");
    } else if (cmd == "reps") {
        if (c.n < 2) throw Usage("reps needs --n m >= 2");
        int level = c.level < 0 ? g.rank() : c.level;
        auto reps = representatives_mod(g, level, c.n);
        json arr = json::array(), fin = json::array();
        for (const auto& r : reps) arr.push_back(r.str());
        for (const auto& f : enumerate_finite_quotient(g, level, c.n)) fin.push_back(f.str());
        j["level"] = level;
        j["modulus"] = c.n;
        j["count"] = reps.size();
        j["representatives"] = arr;
        j["finite_quotient"] = fin;
    } else if (cmd == "fuzzcheck") {
        j["summary"] = fuzzcheck(g, c, opts);
    }
    return j;
}

}  // namespace

Result run(const std::vector<std::string>& args, const std::string& stdin_text) {
    Config c;
    std::string cmd = args.empty() ? "" : args[0];
    auto usage = [&](const std::string& msg) {
        json j;
        j["version"] = "oag-v1";
        j["error"] = {{"kind", "usage"}, {"message", msg}};
        return Result{2, render(j, c)};
    };
    if (std::find(kCommands.begin(), kCommands.end(), cmd) == kCommands.end())
        return usage(cmd.empty() ? "missing command" : "unknown command " + cmd);

    CLI::App app{"oag " + cmd};
    app.add_option("--group", c.group, "group, e.g. Z*Q");
    app.add_option("--n", c.n);
    app.add_option("--modbound", c.modbound)->check(CLI::Range(Int{2}, Int{1000}));
    app.add_option("--box", c.box)->check(CLI::Range(Int{1}, Int{1000}));
    app.add_option("--budget", c.budget);
    app.add_option("--seed", c.seed);
    app.add_option("--count", c.count);
    app.add_option("--level", c.level);
    app.add_option("--format", c.format)->check(CLI::IsMember({"json", "human"}));
    app.add_option("--file", c.file);
    app.add_option("inputs", c.inputs);
    try {
        std::vector<std::string> rest(args.rbegin(), args.rend() - 1);  // CLI11 wants them reversed
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        return usage(e.what());
    }
    json out;
    out["version"] = "oag-v1";
    out["command"] = cmd;
    out["config"] = config_json(c);
    try {
        Config run_cfg = c;
        if (!c.file.empty()) run_cfg.inputs.insert(run_cfg.inputs.begin(), read_file(c.file, stdin_text));
        QeOptions opts;
        opts.node_budget = c.budget;
        json body = dispatch(cmd, run_cfg, opts);
        for (auto& [k, v] : body.items()) out[k] = v;
        return Result{0, render(out, c)};
    } catch (const Usage& e) {
        return usage(e.what());
    } catch (const Error& e) {
        json err;
        err["kind"] = e.kind();
        err["message"] = e.what();
        if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
            err["line"] = pe->line();
            err["column"] = pe->column();
        }
        if (c.format == "human") err["context"] = cmd + " on " + (c.inputs.empty() ? c.file : c.inputs.front());
        out["error"] = err;
        return Result{1, render(out, c)};
    }
}

}  // namespace oag::cli
