#include "catcluster/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "catcluster/categorification.hpp"
#include "catcluster/transitions.hpp"
#include "catcluster/verify.hpp"

namespace catcluster::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::string family, type, format = "pretty", seed_file, filter = "*", from, to, tuple;
    int n = 0;
    int depth = -1;
    std::optional<long long> budget;
    uint64_t rng_seed = 0;
    bool kkop = false, timings = false;
    std::vector<std::string> positional;
};

AffineTag parse_affine_tag(const std::string& s) {
    // D4_1, E6_1 (the trailing _1 marks the untwisted affine type)
    if (s.size() < 4 || s.substr(s.size() - 2) != "_1" || (s[0] != 'D' && s[0] != 'E'))
        throw DomainError("affine type must look like D4_1 or E6_1, got '" + s + "'");
    AffineTag t{s[0], 0};
    try {
        t.n = std::stoi(s.substr(1, s.size() - 3));
    } catch (const std::exception&) {
        throw DomainError("bad rank in affine type '" + s + "'");
    }
    affine_edges(t);
    return t;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot read seed file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::shared_ptr<const FamilyContext> context_from(const Options& o) {
    if (o.family.empty()) throw DomainError("--family is required");
    FamilyKey key = parse_family(o.family, o.n == 0 && o.family == "D4_s2" ? 4 : o.n);
    auto ctx = family_context(key);
    ctx->fan->set_budget_override(o.budget);
    return ctx;
}

std::shared_ptr<const FamilyContext> fan_context_from(const Options& o) {
    std::shared_ptr<const FamilyContext> ctx;
    if (!o.type.empty()) ctx = family_context_for_type(parse_affine_tag(o.type));
    else if (!o.family.empty()) return context_from(o);
    else throw DomainError("--type or --family is required");
    ctx->fan->set_budget_override(o.budget);
    return ctx;
}

std::string join_positional(const Options& o, const char* what) {
    if (o.positional.empty()) throw DomainError(std::string("missing ") + what);
    std::string s;
    for (auto& p : o.positional) s += (s.empty() ? "" : " ") + p;
    return s;
}

json expansion_to_json(const Expansion& e) {
    return json::parse(expansion_json(e));
}

json factor_to_json(const Factor& f) {
    json j;
    switch (f.kind) {
        case Factor::Frozen:
            j["kind"] = "frozen";
            j["node"] = f.node;
            break;
        case Factor::Real:
            j["kind"] = "real";
            j["root"] = format_rootvec(f.root);
            break;
        case Factor::Delta:
            j["kind"] = "delta";
            break;
    }
    j["mult"] = f.mult;
    j["monomial"] = format_monomial(f.monomial);
    return j;
}

std::string factor_line(const Factor& f) {
    std::string what = f.kind == Factor::Frozen ? "F_" + std::to_string(f.node)
                       : f.kind == Factor::Real ? "real " + format_rootvec(f.root)
                                                : std::string("delta");
    return what + " x" + std::to_string(f.mult) + "\t" + format_monomial(f.monomial);
}

void emit(std::ostream& out, const Options& o, const json& j, const std::vector<std::pair<std::string, std::string>>& rows,
          const std::string& pretty) {
    if (o.format == "json") {
        out << j.dump() << "\n";
    } else if (o.format == "tsv") {
        for (auto& [k, v] : rows) out << k << "\t" << v << "\n";
    } else {
        out << pretty;
    }
}

std::string ints(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// ---- subcommands

int cmd_classify(const Options& o, std::ostream& out) {
    auto ctx = context_from(o);
    Monomial m = parse_monomial(join_positional(o, "monomial"));
    check_alphabet(m, ctx->cfg);
    Classification c = classify(m, *ctx);
    json j;
    j["family"] = ctx->cfg.key.name();
    j["monomial"] = format_monomial(m);
    j["gamma"] = format_rootvec(c.gamma);
    j["gamma_family"] = format_rootvec(c.gamma_family);
    j["verdict"] = c.real ? "real" : "imaginary";
    j["m_delta"] = c.m_delta;
    j["certificate"] = c.certificate;
    if (c.real) j["cluster_monomial"] = format_monomial(c.cluster_monomial);
    j["expansion"] = expansion_to_json(c.expansion);
    j["factors"] = json::array();
    for (auto& f : c.factors) j["factors"].push_back(factor_to_json(f));
    std::vector<std::pair<std::string, std::string>> rows = {
        {"family", ctx->cfg.key.name()}, {"monomial", format_monomial(m)}, {"gamma", format_rootvec(c.gamma)},
        {"verdict", c.real ? "real" : "imaginary"}, {"m_delta", std::to_string(c.m_delta)},
        {"certificate", ints(c.certificate)}};
    std::ostringstream p;
    p << format_monomial(m) << " in " << ctx->cfg.key.name() << "\n";
    p << "  G(m)      = " << format_rootvec(c.gamma) << "\n";
    p << "  verdict   = " << (c.real ? "real" : "imaginary") << " (m_delta = " << c.m_delta << ")\n";
    p << "  expansion = " << expansion_json(c.expansion) << "\n";
    if (c.real) p << "  certificate [" << ints(c.certificate) << "]\n";
    for (auto& f : c.factors) p << "  factor " << factor_line(f) << "\n";
    emit(out, o, j, rows, p.str());
    return 0;
}

int cmd_factorize(const Options& o, std::ostream& out) {
    auto ctx = context_from(o);
    Monomial m = parse_monomial(join_positional(o, "monomial"));
    check_alphabet(m, ctx->cfg);
    auto fs = factorize(m, *ctx);
    json j;
    j["family"] = ctx->cfg.key.name();
    j["monomial"] = format_monomial(m);
    j["factors"] = json::array();
    std::vector<std::pair<std::string, std::string>> rows;
    std::string p;
    for (auto& f : fs) {
        j["factors"].push_back(factor_to_json(f));
        rows.push_back({f.kind == Factor::Frozen ? "frozen" : f.kind == Factor::Real ? "real" : "delta",
                        format_monomial(f.monomial)});
        p += factor_line(f) + "\n";
    }
    emit(out, o, j, rows, p);
    return 0;
}

int cmd_expand(const Options& o, std::ostream& out) {
    auto ctx = fan_context_from(o);
    const FanContext& fan = *ctx->fan;
    RootVec g = parse_rootvec(join_positional(o, "root vector"), fan.sys().dim(), fan.sys().delta);
    Expansion e = fan.cluster_expansion(g);
    json j;
    j["type"] = fan.sys().tag.name();
    j["gamma"] = format_rootvec(g);
    json ej = expansion_to_json(e);
    j["delta"] = ej["delta"];
    j["real"] = ej["real"];
    std::vector<std::pair<std::string, std::string>> rows = {{"delta", std::to_string(e.delta)}};
    std::string p = format_rootvec(g) + " = ";
    bool first = true;
    if (e.delta) p += std::to_string(e.delta) + "*delta", first = false;
    for (auto& [r, m] : e.real) {
        rows.push_back({format_rootvec(r), std::to_string(m)});
        p += (first ? "" : " + ") + std::to_string(m) + "*(" + format_rootvec(r) + ")";
        first = false;
    }
    if (first) p += "0";
    emit(out, o, j, rows, p + "\n");
    return 0;
}

int cmd_lambda(const Options& o, std::ostream& out) {
    auto ctx = fan_context_from(o);
    const FanContext& fan = *ctx->fan;
    json j;
    j["type"] = fan.sys().tag.name();
    j["coxeter"] = fan.coxeter().order;
    j["components"] = json::array();
    std::vector<std::pair<std::string, std::string>> rows;
    std::ostringstream p;
    size_t ci = 0;
    for (auto& comp : fan.lambda()) {
        json cj = json::array();
        p << "component " << ci << ":\n";
        for (auto& b : comp) {
            auto orb = c_orbit_classify(fan.sys(), fan.coxeter(), b, default_orbit_cap(fan.sys()));
            cj.push_back({{"root", format_rootvec(b)}, {"period", orb.finite ? orb.period : 0}});
            rows.push_back({std::to_string(ci), format_rootvec(b)});
            p << "  " << format_rootvec(b) << "  period " << orb.period << "\n";
        }
        j["components"].push_back(cj);
        ++ci;
    }
    emit(out, o, j, rows, p.str());
    return 0;
}

int cmd_transition(const Options& o, std::ostream& out) {
    if (o.type.empty() || o.from.empty() || o.to.empty() || o.tuple.empty())
        throw DomainError("transition needs --type, --from, --to and --tuple");
    FiniteType t = parse_finite_type(o.type);
    auto from = parse_word(o.from, t), to = parse_word(o.to, t);
    auto c = parse_tuple(o.tuple, from.size());
    long long budget = o.budget ? *o.budget : env_budget(default_move_budget);
    auto path = find_move_path(t, from, to, budget);
    auto img = transition_along(c, path);
    json j;
    j["type"] = o.type;
    j["from"] = format_word(from);
    j["to"] = format_word(to);
    j["tuple"] = format_tuple(c);
    j["image"] = format_tuple(img);
    j["moves"] = path.size();
    emit(out, o, j, {{"image", format_tuple(img)}, {"moves", std::to_string(path.size())}}, format_tuple(img) + "\n");
    return 0;
}

json seed_json(const ExchangeMatrix& B, const std::optional<std::vector<Monomial>>& labels) {
    json nodes = json::array();
    for (size_t i = 0; i < B.size(); ++i) {
        json nj{{"id", B.ids[i]}, {"frozen", bool(B.frozen[i])}};
        if (labels) nj["label"] = format_monomial((*labels)[i]);
        nodes.push_back(nj);
    }
    json arrows = json::array();
    for (size_t i = 0; i < B.size(); ++i)
        for (size_t j = 0; j < B.size(); ++j)
            if (B.b[i][j] > 0) arrows.push_back({{"from", B.ids[i]}, {"to", B.ids[j]}, {"mult", B.b[i][j]}});
    return {{"nodes", nodes}, {"arrows", arrows}};
}

int cmd_seed(const Options& o, std::ostream& out) {
    ExchangeMatrix B;
    std::optional<std::vector<Monomial>> labels;
    json j;
    if (!o.seed_file.empty()) {
        auto sf = parse_seed_text(read_file(o.seed_file));
        B = sf.matrix, labels = sf.labels;
        j["source"] = o.seed_file;
    } else {
        if (o.family.empty()) throw DomainError("--family or --seed-file is required");
        FamilyKey key = parse_family(o.family, o.family == "D4_s2" && o.n == 0 ? 4 : o.n);
        FamilyConfig cfg = make_family(key);
        j["family"] = key.name();
        j["interval"] = {cfg.a, cfg.b};
        if (o.kkop) {
            Seed s = kkop_initial_seed(cfg.fin, cfg.sequence, cfg.a, cfg.b);
            B = s.matrix, labels = s.labels;
            j["stage"] = "initial";
        } else if (cfg.has_g) {
            auto ctx = family_context(key);
            B = ctx->seed.matrix, labels = ctx->seed.labels;
            j["stage"] = "mutated";
        } else {
            TheoremResult r = theorem_mutation_sequence(key);
            B = r.seed.matrix, labels = r.seed.labels;
            j["stage"] = "mutated";
        }
    }
    auto det = detect_affine_type(B);
    j["affine_type"] = det ? json(det->tag.name()) : json(nullptr);
    json sj = seed_json(B, labels);
    j["nodes"] = sj["nodes"];
    j["arrows"] = sj["arrows"];
    std::string text = serialize_seed(B, labels);
    std::string head = "# principal part: " + (det ? det->tag.name() : std::string("not affine")) + "\n";
    emit(out, o, j, {}, head + text);
    if (o.format == "tsv") out << head << text;
    return 0;
}

std::vector<size_t> parse_node_list(const ExchangeMatrix& B, const std::vector<std::string>& items) {
    std::vector<size_t> ks;
    for (auto& item : items) {
        std::stringstream ss(item);
        for (std::string tok; std::getline(ss, tok, ',');) {
            if (tok.empty()) continue;
            size_t k = B.index_of(tok);
            if (B.frozen[k]) throw IndexError("node " + tok + " is frozen");
            ks.push_back(k);
        }
    }
    return ks;
}

int cmd_mutate(const Options& o, std::ostream& out) {
    json j;
    std::shared_ptr<const FamilyContext> ctx;
    Seed S;
    if (!o.seed_file.empty()) {
        auto sf = parse_seed_text(read_file(o.seed_file));
        S = initial_seed(sf.matrix, sf.labels);
        j["source"] = o.seed_file;
    } else {
        ctx = context_from(o);
        S = ctx->seed;
        j["family"] = ctx->cfg.key.name();
    }
    if (o.depth >= 0) {
        if (!ctx) {
            // Unlabeled exploration: count seeds and variables reachable within the depth.
            const size_t N = S.matrix.size();
            auto ex = S.matrix.exchangeable();
            ClusterVarTable table(N, o.rng_seed);
            std::vector<size_t> ids(N);
            for (size_t v = 0; v < N; ++v) ids[v] = v;
            std::set<std::vector<size_t>> seen;
            auto key = [&](const std::vector<size_t>& v) {
                std::vector<size_t> k;
                for (size_t u : ex) k.push_back(v[u]);
                std::sort(k.begin(), k.end());
                return k;
            };
            std::vector<std::pair<ExchangeMatrix, std::vector<size_t>>> frontier{{S.matrix, ids}};
            seen.insert(key(ids));
            bool positive = true;
            for (int d = 0; d < o.depth; ++d) {
                decltype(frontier) next;
                for (auto& [B, cur] : frontier)
                    for (size_t u : ex) {
                        auto nid = cur;
                        nid[u] = table.mutate(B, cur, u);
                        positive = positive && table.poly(nid[u]).nonnegative_coefficients();
                        if (seen.insert(key(nid)).second) next.push_back({matrix_mutate(B, u), nid});
                    }
                frontier = std::move(next);
            }
            j["depth"] = o.depth;
            j["seeds"] = seen.size();
            j["variables"] = table.count() - N;
            j["positive"] = positive;
            emit(out, o, j,
                 {{"seeds", std::to_string(seen.size())}, {"variables", std::to_string(table.count() - N)}},
                 "depth " + std::to_string(o.depth) + ": " + std::to_string(seen.size()) + " seeds, " +
                     std::to_string(table.count() - N) + " new variables\n");
            return 0;
        }
        ExploreOptions eo;
        eo.depth = o.depth;
        eo.check_positivity = eo.check_tropical = true;
        auto r = explore_labeled_seeds(*ctx, eo);
        if (!r.failure.empty()) throw InvariantError(r.failure);
        j["depth"] = o.depth;
        j["seeds"] = r.seeds;
        j["variables"] = r.variables;
        j["label_checks"] = r.label_checks;
        j["disambiguated"] = r.disambiguated;
        emit(out, o, j,
             {{"seeds", std::to_string(r.seeds)}, {"variables", std::to_string(r.variables)},
              {"label_checks", std::to_string(r.label_checks)}},
             "depth " + std::to_string(o.depth) + ": " + std::to_string(r.seeds) + " seeds, " +
                 std::to_string(r.variables) + " new variables, G = d on " + std::to_string(r.label_checks) +
                 " labels\n");
        return 0;
    }
    auto ks = parse_node_list(S.matrix, o.positional);
    json muts = json::array();
    for (size_t k : ks) {
        muts.push_back(S.matrix.ids[k]);
        if (S.labels) {
            LabelChooser choose;
            if (ctx) {
                RootVec want = ctx->d_vector(exchange_numerator(S, k).divide_exact(*S.vars[k]));
                choose = [&, want](const LabelCandidates& c) -> std::optional<Monomial> {
                    bool a = G(c.up, ctx->cfg) == want, b = G(c.down, ctx->cfg) == want;
                    if (a == b) return std::nullopt;
                    return a ? c.up : c.down;
                };
            }
            S = monomial_seed_mutate(S, k, choose);
        } else {
            S = seed_mutate(S, k);
        }
    }
    j["mutations"] = muts;
    auto ex = S.matrix.exchangeable();
    json dv;
    std::vector<std::pair<std::string, std::string>> rows;
    for (size_t u : ex) {
        std::string d = ints(d_vector_of(*S.vars[u], ex));
        dv[S.matrix.ids[u]] = d;
        rows.push_back({S.matrix.ids[u], d});
    }
    j["d_vectors"] = dv;
    j["seed"] = serialize_seed(S.matrix, S.labels);
    emit(out, o, j, rows, serialize_seed(S.matrix, S.labels));
    return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
    CheckOptions co;
    co.rng_seed = o.rng_seed;
    co.budget = o.budget;
    auto results = run_suite(o.filter, co);
    bool ok = true;
    json arr = json::array();
    for (auto& r : results) {
        ok = ok && r.pass;
        json rj{{"id", r.id}, {"criterion", r.criterion}, {"status", r.pass ? "pass" : "fail"}};
        if (o.timings) rj["elapsed"] = r.elapsed;
        rj["counterexample"] = r.pass ? json(nullptr) : json(r.counterexample);
        arr.push_back(rj);
    }
    if (o.format == "json") {
        out << arr.dump() << "\n";
    } else if (o.format == "pretty") {
        for (auto& r : results)
            out << (r.pass ? "PASS " : "FAIL ") << r.id << " (" << r.elapsed << " s)"
                << (r.pass ? "" : "  " + r.counterexample) << "\n";
    } else {
        out << "id\tstatus\telapsed\tcounterexample\n";
        for (auto& r : results) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", r.elapsed);
            out << r.id << "\t" << (r.pass ? "pass" : "fail") << "\t" << buf << "\t" << r.counterexample << "\n";
        }
    }
    return ok ? 0 : 1;
}

void report(std::ostream& err, const Options& o, const char* kind, const std::string& msg) {
    if (o.format == "json") err << json{{"error", kind}, {"message", msg}}.dump() << "\n";
    else err << "error (" << kind << "): " << msg << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Affine cluster categorification toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto common = [&](CLI::App* c) {
        c->add_option("--format", o.format, "json, tsv or pretty")->check(CLI::IsMember({"json", "tsv", "pretty"}));
        c->add_option("--budget", o.budget, "search budget (fan walk steps or visited words)");
        c->add_option("--rng-seed", o.rng_seed, "seed for sampled checks and fingerprints");
    };
    auto family = [&](CLI::App* c) {
        c->add_option("--family", o.family, "Dn_s1, D4_s2, En_s1 or An_s1");
        c->add_option("--n", o.n, "rank of the family");
    };
    auto* classify_cmd = app.add_subcommand("classify", "real/imaginary verdict for a monomial");
    family(classify_cmd), common(classify_cmd);
    classify_cmd->add_option("monomial", o.positional, "e.g. \"3_0 3_4\"");
    auto* factorize_cmd = app.add_subcommand("factorize", "tensor factorization of a monomial");
    family(factorize_cmd), common(factorize_cmd);
    factorize_cmd->add_option("monomial", o.positional);
    auto* expand_cmd = app.add_subcommand("expand", "c-cluster expansion of a root-lattice vector");
    family(expand_cmd), common(expand_cmd);
    expand_cmd->add_option("--type", o.type, "D<n>_1 or E<n>_1");
    expand_cmd->add_option("vector", o.positional, "a0,...,an or symbolic, e.g. d-a1");
    auto* mutate_cmd = app.add_subcommand("mutate", "mutate a seed along a node list, or explore to a depth");
    family(mutate_cmd), common(mutate_cmd);
    mutate_cmd->add_option("--seed-file", o.seed_file);
    mutate_cmd->add_option("--depth", o.depth, "explore every seed within this many mutations");
    mutate_cmd->add_option("nodes", o.positional, "node ids, comma or space separated");
    auto* seed_cmd = app.add_subcommand("seed", "print a family seed or normalize a seed file");
    family(seed_cmd), common(seed_cmd);
    seed_cmd->add_option("--seed-file", o.seed_file);
    seed_cmd->add_flag("--initial", o.kkop, "the seed before the theorem mutations");
    auto* lambda_cmd = app.add_subcommand("lambda", "finite c-orbit roots by component");
    family(lambda_cmd), common(lambda_cmd);
    lambda_cmd->add_option("--type", o.type);
    auto* transition_cmd = app.add_subcommand("transition", "transition map between reduced words");
    common(transition_cmd);
    transition_cmd->add_option("--type", o.type, "finite type, e.g. D4");
    transition_cmd->add_option("--from", o.from);
    transition_cmd->add_option("--to", o.to);
    transition_cmd->add_option("--tuple", o.tuple);
    auto* verify_cmd = app.add_subcommand("verify", "run registered checks");
    common(verify_cmd);
    verify_cmd->add_option("--filter", o.filter, "glob on check ids");
    verify_cmd->add_flag("--timings", o.timings, "include elapsed seconds in json output");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
        if (verify_cmd->parsed() && verify_cmd->get_option("--format")->count() == 0) o.format = "tsv";
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        report(err, o, "domain", e.what());
        return 1;
    }
    if (o.budget && *o.budget <= 0) {
        report(err, o, "domain", "--budget must be positive");
        return 1;
    }
    try {
        if (classify_cmd->parsed()) return cmd_classify(o, out);
        if (factorize_cmd->parsed()) return cmd_factorize(o, out);
        if (expand_cmd->parsed()) return cmd_expand(o, out);
        if (mutate_cmd->parsed()) return cmd_mutate(o, out);
        if (seed_cmd->parsed()) return cmd_seed(o, out);
        if (lambda_cmd->parsed()) return cmd_lambda(o, out);
        if (transition_cmd->parsed()) return cmd_transition(o, out);
        if (verify_cmd->parsed()) return cmd_verify(o, out);
    } catch (const IndeterminateError& e) {
        report(err, o, "indeterminate", e.what());
        return 2;
    } catch (const InvariantError& e) {
        report(err, o, "invariant", e.what());
        return 2;
    } catch (const DomainError& e) {
        report(err, o, "domain", e.what());
        return 1;
    } catch (const std::exception& e) {
        report(err, o, "invariant", e.what());
        return 2;
    }
    return 1;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace catcluster::cli
